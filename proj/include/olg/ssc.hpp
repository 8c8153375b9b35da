#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "olg/decoder.hpp"
#include "olg/latent.hpp"

namespace olg {

// Quantized states compare by exact component equality: quantize is
// idempotent onto a finite grid, so no floating tolerance is needed.
using StateKey = std::vector<double>;
using StateSet = std::set<StateKey>;

inline StateKey state_key(const DesignerState& s) { return s.flat(); }

inline DesignerState state_from_key(const StateKey& key, int n, int d) {
    if (key.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d))
        throw std::invalid_argument("state_from_key: size mismatch");
    DesignerState s;
    for (int i = 0; i < n; ++i)
        s.window.emplace_back(key.begin() + static_cast<std::ptrdiff_t>(i) * d,
                              key.begin() + static_cast<std::ptrdiff_t>(i + 1) * d);
    return s;
}

// Per-step sets of reachable states, S_0 .. S_max.
struct StateSetSequence {
    int n = 0;
    int d = 0;
    std::vector<StateSet> per_step;
};

struct ClosureReport {
    int g = 0;
    int h = 0;
    bool occurred = false;
    StateSet closure_set;   // finite case, populated when occurred
    double coverage = 0.0;  // continuous case
    double epsilon = 0.0;   // continuous case
};

// Deterministic one-step policy used by the exact oracle. The step index is
// part of the signature so scripted time-dependent policies (the periodic
// control case) can be enumerated too.
using StatePolicy = std::function<LatentVector(const DesignerState&, int step)>;

// Exact forward enumeration: S_0 = initial_set, S_{i+1} = image of S_i under
// (transition after policy), actions quantized before windowing.
inline StateSetSequence enumerate_state_sets(const StatePolicy& policy, int quantize_levels,
                                             int n, int d, const StateSet& initial_set,
                                             int max_step, std::size_t state_cap = 200000) {
    if (initial_set.empty())
        throw std::invalid_argument("enumerate_state_sets: empty initial set");
    StateSetSequence seq;
    seq.n = n;
    seq.d = d;
    seq.per_step.push_back(initial_set);
    for (int step = 0; step < max_step; ++step) {
        StateSet next;
        for (const auto& key : seq.per_step.back()) {
            DesignerState s = state_from_key(key, n, d);
            LatentVector a = quantize(policy(s, step), quantize_levels);
            next.insert(state_key(transition(s, a)));
        }
        if (next.size() > state_cap)
            throw std::runtime_error("enumerate_state_sets: state cap exceeded at step " +
                                     std::to_string(step + 1) + " (" +
                                     std::to_string(next.size()) + " states)");
        seq.per_step.push_back(std::move(next));
    }
    return seq;
}

inline StateSet union_range(const StateSetSequence& seq, int from, int to_inclusive) {
    StateSet u;
    for (int i = from; i <= to_inclusive; ++i)
        u.insert(seq.per_step[static_cast<std::size_t>(i)].begin(),
                 seq.per_step[static_cast<std::size_t>(i)].end());
    return u;
}

inline bool is_subset(const StateSet& a, const StateSet& b) {
    for (const auto& k : a)
        if (!b.count(k)) return false;
    return true;
}

// SSC occurs at [g, h] iff S_h is contained in the union S_g .. S_{h-1}.
inline ClosureReport detect_ssc_finite(const StateSetSequence& seq, int g, int h) {
    if (g >= h) throw std::invalid_argument("detect_ssc_finite: g must be < h");
    if (h >= static_cast<int>(seq.per_step.size()))
        throw std::invalid_argument("detect_ssc_finite: sequence does not cover step h");
    ClosureReport report;
    report.g = g;
    report.h = h;
    StateSet past = union_range(seq, g, h - 1);
    report.occurred = is_subset(seq.per_step[static_cast<std::size_t>(h)], past);
    if (report.occurred) report.closure_set = std::move(past);
    return report;
}

// First [g, h] at which SSC occurs, scanning h upward and g downward, or
// nullopt if none within the sequence.
inline std::optional<std::pair<int, int>> find_ssc(const StateSetSequence& seq, int min_g = 0) {
    for (int h = min_g + 1; h < static_cast<int>(seq.per_step.size()); ++h)
        for (int g = min_g; g < h; ++g)
            if (detect_ssc_finite(seq, g, h).occurred) return std::make_pair(g, h);
    return std::nullopt;
}

struct Property1Result {
    bool forward_containment = false; // union S_h..S_H inside S_{g:h-1}
    bool reverse_containment = false; // S_{g:h-1} inside union S_h..S_H
    std::optional<StateKey> witness;  // escaping state, if any
    int witness_step = -1;
};

// Brute-force confirmation that closure at [g, h] traps the process: simulate
// forward to H = horizon_multiplier * h and check that no state outside
// S_{g:h-1} appears. The reverse containment (states of the closure that keep
// recurring) is reported separately; the theory only guarantees the forward
// direction.
inline Property1Result verify_property1(const StatePolicy& policy, int quantize_levels,
                                        int n, int d, const StateSet& initial_set,
                                        int g, int h, int horizon_multiplier) {
    if (horizon_multiplier < 1)
        throw std::invalid_argument("verify_property1: multiplier must be >= 1");
    int big_h = horizon_multiplier * h;
    StateSetSequence seq =
        enumerate_state_sets(policy, quantize_levels, n, d, initial_set, big_h);
    ClosureReport at_h = detect_ssc_finite(seq, g, h);
    if (!at_h.occurred)
        throw std::invalid_argument("verify_property1: SSC not detected at [g,h]");

    Property1Result result;
    StateSet closure = union_range(seq, g, h - 1);
    result.forward_containment = true;
    for (int i = h; i <= big_h && result.forward_containment; ++i) {
        for (const auto& key : seq.per_step[static_cast<std::size_t>(i)]) {
            if (!closure.count(key)) {
                result.forward_containment = false;
                result.witness = key;
                result.witness_step = i;
                break;
            }
        }
    }
    StateSet tail = union_range(seq, h, big_h);
    result.reverse_containment = is_subset(closure, tail);
    return result;
}

// Fraction of successor states whose Euclidean distance to the nearest
// precedent state is <= epsilon. Distances in raw latent space R^{n*d}.
inline double coverage_statistic(const std::vector<DesignerState>& precedent,
                                 const std::vector<DesignerState>& successor,
                                 double epsilon) {
    if (precedent.empty()) throw std::invalid_argument("coverage_statistic: empty precedent set");
    if (epsilon <= 0.0) throw std::invalid_argument("coverage_statistic: epsilon must be > 0");
    if (successor.empty()) return 1.0;
    std::vector<std::vector<double>> ref;
    ref.reserve(precedent.size());
    for (const auto& s : precedent) ref.push_back(s.flat());
    double eps2 = epsilon * epsilon;
    std::size_t covered = 0;
    for (const auto& s : successor) {
        std::vector<double> x = s.flat();
        bool hit = false;
        for (const auto& r : ref) {
            double acc = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double diff = x[i] - r[i];
                acc += diff * diff;
                if (acc > eps2) break;
            }
            if (acc <= eps2) {
                hit = true;
                break;
            }
        }
        if (hit) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(successor.size());
}

struct CategorizedStates {
    std::vector<DesignerState> initial;   // steps [0, n-1]
    std::vector<DesignerState> precedent; // steps [n, h-1]
    std::vector<DesignerState> successor; // steps [h, 2h]
    int ignored_beyond_horizon = 0;       // steps > 2h, dropped with a count
};

// Partition collected (step, state) samples by the step intervals
// [0,n-1] / [n,h-1] / [h,2h].
inline CategorizedStates categorize_states(const std::vector<std::pair<int, DesignerState>>& states,
                                           const EpisodeConfig& config) {
    CategorizedStates out;
    for (const auto& [step, state] : states) {
        if (step < 0) throw std::invalid_argument("categorize_states: negative step");
        if (step <= config.n - 1) out.initial.push_back(state);
        else if (step <= config.h - 1) out.precedent.push_back(state);
        else if (step <= 2 * config.h) out.successor.push_back(state);
        else ++out.ignored_beyond_horizon;
    }
    return out;
}

// Structured text report plus a per-step set-size CSV for plotting.
inline void write_closure_report(std::ostream& out, const ClosureReport& report,
                                 const StateSetSequence* seq = nullptr) {
    out << "g: " << report.g << '\n';
    out << "h: " << report.h << '\n';
    out << "occurred: " << (report.occurred ? "true" : "false") << '\n';
    out.precision(17);
    out << "coverage: " << report.coverage << '\n';
    out << "epsilon: " << report.epsilon << '\n';
    out << "closure_size: " << report.closure_set.size() << '\n';
    if (seq) {
        out << "set_sizes:\n";
        for (std::size_t i = 0; i < seq->per_step.size(); ++i)
            out << "  step " << i << ": " << seq->per_step[i].size() << '\n';
    }
}

} // namespace olg
