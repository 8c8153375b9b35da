#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "olg/mdp.hpp"
#include "olg/reward.hpp"
#include "olg/rng.hpp"
#include "olg/segment.hpp"

namespace olg {

inline double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("euclidean: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// k-means centroids used as the reference set R.
struct ReferenceSet {
    std::vector<std::vector<double>> centroids;
};

// Minimal neighbor distance: mean over X of the Euclidean distance to the
// nearest reference.
inline double mnd(const std::vector<std::vector<double>>& samples, const ReferenceSet& refs) {
    if (samples.empty()) throw std::invalid_argument("mnd: empty sample set");
    if (refs.centroids.empty()) throw std::invalid_argument("mnd: empty reference set");
    double acc = 0.0;
    for (const auto& x : samples) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : refs.centroids) best = std::min(best, euclidean(x, r));
        acc += best;
    }
    return acc / static_cast<double>(samples.size());
}

// Lloyd's algorithm with k-means++-style seeded initialization. Empty
// clusters are re-seeded to the point farthest from its assigned centroid.
// Deterministic given the seed; the objective never increases.
inline ReferenceSet kmeans(const std::vector<std::vector<double>>& points, int k,
                           int max_iters, std::uint64_t seed,
                           std::vector<double>* objective_history = nullptr) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("kmeans: fewer points than clusters");

    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(0x5eed)));
    std::size_t dim = points.front().size();

    // k-means++ init: first centroid uniform, then proportional to squared
    // distance to the nearest chosen centroid.
    std::vector<std::vector<double>> centroids;
    centroids.push_back(points[rng.next_below(points.size())]);
    std::vector<double> d2(points.size());
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) {
                double d = euclidean(points[i], c);
                best = std::min(best, d * d);
            }
            d2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.next_below(points.size());
        } else {
            double target = rng.next_unit() * total;
            double acc = 0.0;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<int> assign(points.size(), -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < points.size(); ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = euclidean(points[i], centroids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<std::vector<double>> sums(static_cast<std::size_t>(k),
                                              std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            auto c = static_cast<std::size_t>(assign[i]);
            ++counts[c];
            for (std::size_t j = 0; j < dim; ++j) sums[c][j] += points[i][j];
        }
        for (int c = 0; c < k; ++c) {
            auto cc = static_cast<std::size_t>(c);
            if (counts[cc] == 0) {
                // Re-seed to the point farthest from its assigned centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < points.size(); ++i) {
                    double d = euclidean(points[i],
                                         centroids[static_cast<std::size_t>(assign[i])]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids[cc] = points[far];
                assign[far] = c;
            } else {
                for (std::size_t j = 0; j < dim; ++j)
                    centroids[cc][j] = sums[cc][j] / static_cast<double>(counts[cc]);
            }
        }
        if (objective_history) {
            double obj = 0.0;
            for (const auto& p : points) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& c : centroids) {
                    double d = euclidean(p, c);
                    best = std::min(best, d * d);
                }
                obj += best;
            }
            objective_history->push_back(obj);
        }
    }
    return ReferenceSet{std::move(centroids)};
}

inline double kmeans_objective(const std::vector<std::vector<double>>& points,
                               const ReferenceSet& refs) {
    double acc = 0.0;
    for (const auto& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : refs.centroids) {
            double d = euclidean(p, c);
            best = std::min(best, d * d);
        }
        acc += best;
    }
    return acc;
}

// Ratio of differing tiles between two segments.
inline double segment_hamming(const Segment& a, const Segment& b) {
    return normalized_hamming(a, b);
}

// DTW over the two segment sequences with per-pair cost segment_hamming,
// steps {insert, delete, match} and a Sakoe-Chiba band |i-j| <= window.
// Returns the total accumulated cost of the optimal path, unnormalized: the
// worked reference pair ABCABC / BCABCA costs 2, not 2 / path length.
inline double dtw_hamming(const Level& a, const Level& b, int window) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw_hamming: empty level");
    int la = static_cast<int>(a.size());
    int lb = static_cast<int>(b.size());
    if (window < std::abs(la - lb))
        throw std::invalid_argument("dtw_hamming: band narrower than length difference");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(static_cast<std::size_t>(lb) + 1, inf);
    std::vector<double> cur(static_cast<std::size_t>(lb) + 1, inf);
    prev[0] = 0.0;
    for (int i = 1; i <= la; ++i) {
        std::fill(cur.begin(), cur.end(), inf);
        int lo = std::max(1, i - window);
        int hi = std::min(lb, i + window);
        for (int j = lo; j <= hi; ++j) {
            double cost = segment_hamming(a[static_cast<std::size_t>(i - 1)],
                                          b[static_cast<std::size_t>(j - 1)]);
            double best = std::min({prev[static_cast<std::size_t>(j)],      // insert
                                    cur[static_cast<std::size_t>(j - 1)],   // delete
                                    prev[static_cast<std::size_t>(j - 1)]}); // match
            cur[static_cast<std::size_t>(j)] = cost + best;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(lb)];
}

// Positional Hamming sum for equal-length levels, the un-warped counterpart.
inline double positional_hamming(const Level& a, const Level& b) {
    if (a.size() != b.size()) throw std::invalid_argument("positional_hamming: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += segment_hamming(a[i], b[i]);
    return acc;
}

struct DivReport {
    double d_m = 0.0;          // mean pairwise DTW-H of the baseline corpus
    double mean_pairwise = 0.0; // same for the evaluated corpus
    double div = 0.0;          // mean_pairwise / d_m
    int pair_count = 0;
};

namespace detail {
// Mean DTW-H over pair_count unordered distinct pairs sampled uniformly
// without replacement (all pairs when there are fewer than pair_count).
inline double mean_pairwise_dtw(const std::vector<Level>& levels, int window, int pair_count,
                                Rng& rng) {
    std::size_t count = levels.size();
    std::size_t total = count * (count - 1) / 2;
    std::vector<std::size_t> pair_ids(total);
    for (std::size_t i = 0; i < total; ++i) pair_ids[i] = i;
    std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(pair_count), total);
    for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + rng.next_below(total - i);
        std::swap(pair_ids[i], pair_ids[j]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < take; ++i) {
        // Unrank the pair id into indices (p, q), p < q.
        std::size_t id = pair_ids[i];
        std::size_t p = 0;
        std::size_t row = count - 1;
        while (id >= row) {
            id -= row;
            --row;
            ++p;
        }
        std::size_t q = p + 1 + id;
        acc += dtw_hamming(levels[p], levels[q], window);
    }
    return acc / static_cast<double>(take);
}
} // namespace detail

// Div of Eq-style normalization: mean pairwise DTW-H of the evaluated corpus
// divided by the same statistic for the baseline generator's corpus.
inline DivReport div_score(const std::vector<Level>& levels_x,
                           const std::vector<Level>& baseline_levels, int window,
                           int pair_count, std::uint64_t seed) {
    if (levels_x.size() < 2 || baseline_levels.size() < 2)
        throw std::invalid_argument("div_score: need at least 2 levels per corpus");
    if (pair_count < 1) throw std::invalid_argument("div_score: pair_count must be >= 1");
    Rng rng_base(mix_seed(seed, static_cast<std::uint64_t>(0xba5e)));
    Rng rng_x(mix_seed(seed, static_cast<std::uint64_t>(0xe7a1)));
    DivReport report;
    report.pair_count = pair_count;
    report.d_m = detail::mean_pairwise_dtw(baseline_levels, window, pair_count, rng_base);
    if (report.d_m == 0.0) throw std::invalid_argument("div_score: degenerate baseline, d_M = 0");
    report.mean_pairwise = detail::mean_pairwise_dtw(levels_x, window, pair_count, rng_x);
    report.div = report.mean_pairwise / report.d_m;
    return report;
}

// Mean of per-step rewards pooled over all trajectories and steps in
// [lo, hi], 1-indexed.
inline std::vector<double> interval_reward_stats(const std::vector<Trajectory>& trajectories,
                                                 const std::vector<std::pair<int, int>>& intervals) {
    if (trajectories.empty())
        throw std::invalid_argument("interval_reward_stats: no trajectories");
    std::vector<double> means;
    for (auto [lo, hi] : intervals) {
        if (lo < 1 || hi < lo) throw std::invalid_argument("interval_reward_stats: bad interval");
        double acc = 0.0;
        std::size_t count = 0;
        for (const auto& traj : trajectories) {
            if (hi > traj.steps())
                throw std::invalid_argument("interval_reward_stats: interval beyond trajectory length");
            for (int s = lo; s <= hi; ++s) {
                acc += traj.rewards[static_cast<std::size_t>(s - 1)];
                ++count;
            }
        }
        means.push_back(acc / static_cast<double>(count));
    }
    return means;
}

} // namespace olg
