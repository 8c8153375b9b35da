#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <vector>

#include "olg/segment.hpp"

namespace olg {

struct RewardConfig {
    int n = 4;               // memory window, shared with EpisodeConfig
    double w_novelty = 1.0;
    double w_play = 1.0;
    double novelty_cap = 0.6; // distance above which novelty saturates
    int jump_height = 4;      // tiles
    int max_gap = 4;          // columns

    void validate() const {
        if (w_novelty < 0.0 || w_play < 0.0)
            throw std::invalid_argument("RewardConfig: negative weight");
        if (w_novelty == 0.0 && w_play == 0.0)
            throw std::invalid_argument("RewardConfig: weights cannot both be zero");
        if (!(novelty_cap > 0.0 && novelty_cap <= 1.0))
            throw std::invalid_argument("RewardConfig: novelty_cap must be in (0,1]");
        if (jump_height < 1 || max_gap < 1)
            throw std::invalid_argument("RewardConfig: walker parameters must be positive");
    }
};

// Ratio of differing tiles.
inline double normalized_hamming(const Segment& a, const Segment& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("normalized_hamming: dimension mismatch");
    int diff = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        if (a.cells[i] != b.cells[i]) ++diff;
    return static_cast<double>(diff) / static_cast<double>(a.cells.size());
}

// Mean over history of min(normalized-Hamming, cap) / cap. Zero iff the new
// segment equals every history segment when cap = 1.
inline double novelty(const Segment& new_seg, const std::vector<Segment>& history,
                      const RewardConfig& cfg) {
    if (history.empty()) throw std::invalid_argument("novelty: empty history");
    double acc = 0.0;
    for (const auto& h : history)
        acc += std::min(normalized_hamming(new_seg, h), cfg.novelty_cap) / cfg.novelty_cap;
    return acc / static_cast<double>(history.size());
}

// Rule-based walker over the concatenation prev|new. A cell is standable if
// it is non-empty with an empty cell above. From a standable cell the walker
// may move to any standable cell strictly to the right by at most
// max_gap + 1 columns, rising at most jump_height rows; any drop is allowed.
// The level is playable if the walker can clear the right edge of `new`
// starting from some standable column of `prev`.
inline bool playable(const Segment& prev, const Segment& new_seg, const RewardConfig& cfg) {
    if (prev.rows != new_seg.rows || prev.cols != new_seg.cols)
        throw std::invalid_argument("playable: dimension mismatch");
    int rows = prev.rows;
    int width = prev.cols + new_seg.cols;
    auto tile = [&](int r, int c) -> char {
        return c < prev.cols ? prev.at(r, c) : new_seg.at(r, c - prev.cols);
    };
    auto standable = [&](int r, int c) {
        return tile(r, c) != '-' && (r == 0 || tile(r - 1, c) == '-');
    };

    std::vector<char> visited(static_cast<std::size_t>(rows) * width, 0);
    std::deque<std::pair<int, int>> frontier;
    for (int c = 0; c < prev.cols; ++c)
        for (int r = 0; r < rows; ++r)
            if (standable(r, c)) {
                visited[static_cast<std::size_t>(r) * width + c] = 1;
                frontier.emplace_back(r, c);
            }

    while (!frontier.empty()) {
        auto [r, c] = frontier.front();
        frontier.pop_front();
        if (c >= prev.cols && c + cfg.max_gap + 1 >= width) return true;
        int reach = std::min(width - 1, c + cfg.max_gap + 1);
        for (int c2 = c + 1; c2 <= reach; ++c2)
            for (int r2 = std::max(0, r - cfg.jump_height); r2 < rows; ++r2) {
                if (!standable(r2, c2)) continue;
                auto& seen = visited[static_cast<std::size_t>(r2) * width + c2];
                if (seen) continue;
                seen = 1;
                frontier.emplace_back(r2, c2);
            }
    }
    return false;
}

// w_novelty * novelty + w_play * (+1 if the new segment is reachable from the
// last history segment, else -1).
inline double reward(const Segment& new_seg, const std::vector<Segment>& history,
                     const RewardConfig& cfg) {
    if (history.empty()) throw std::invalid_argument("reward: empty history");
    double nov = novelty(new_seg, history, cfg);
    double play = playable(history.back(), new_seg, cfg) ? 1.0 : -1.0;
    return cfg.w_novelty * nov + cfg.w_play * play;
}

} // namespace olg
