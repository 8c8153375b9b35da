#include <doctest.h>

#include <algorithm>

#include "olg/reward.hpp"
#include "olg/rng.hpp"

using namespace olg;

namespace {

// Flat floor on the bottom row, everything else empty.
Segment flat_floor(int rows = 14, int cols = 16) {
    Segment seg(rows, cols, '-');
    for (int c = 0; c < cols; ++c) seg.at(rows - 1, c) = 'X';
    return seg;
}

Segment floor_with_gap(int gap_start, int gap_width, int rows = 14, int cols = 16) {
    Segment seg = flat_floor(rows, cols);
    for (int c = gap_start; c < gap_start + gap_width && c < cols; ++c) seg.at(rows - 1, c) = '-';
    return seg;
}

Segment random_segment(Rng& rng, int rows = 8, int cols = 8) {
    Segment seg(rows, cols);
    for (char& c : seg.cells)
        c = kTileAlphabet[static_cast<std::size_t>(rng.next_below(kTileAlphabet.size()))];
    return seg;
}

} // namespace

TEST_CASE("novelty is zero against an identical history") {
    RewardConfig cfg;
    cfg.novelty_cap = 1.0;
    Segment seg = flat_floor();
    CHECK(novelty(seg, {seg, seg, seg}, cfg) == 0.0);
}

TEST_CASE("novelty saturates at one for a fully differing segment") {
    RewardConfig cfg;
    cfg.novelty_cap = 1.0;
    Segment empty(4, 4, '-');
    Segment ground(4, 4, 'X');
    Segment blocks(4, 4, '#');
    CHECK(novelty(blocks, {empty, ground}, cfg) == 1.0);
}

TEST_CASE("novelty of all-ground against empty and ground history is one half") {
    RewardConfig cfg;
    cfg.novelty_cap = 1.0;
    Segment empty(4, 4, '-');
    Segment ground(4, 4, 'X');
    // distances: 1 to empty, 0 to ground; mean 0.5
    CHECK(novelty(ground, {empty, ground}, cfg) == doctest::Approx(0.5));
}

TEST_CASE("novelty rejects empty history and mismatched dimensions") {
    RewardConfig cfg;
    Segment seg(4, 4, '-');
    CHECK_THROWS_AS(novelty(seg, {}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(novelty(seg, {Segment(3, 4, '-')}, cfg), std::invalid_argument);
}

TEST_CASE("novelty is symmetric under history permutation") {
    RewardConfig cfg;
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        Segment seg = random_segment(rng);
        std::vector<Segment> history = {random_segment(rng), random_segment(rng),
                                        random_segment(rng)};
        double base = novelty(seg, history, cfg);
        std::vector<Segment> shuffled = {history[2], history[0], history[1]};
        CHECK(novelty(seg, shuffled, cfg) == doctest::Approx(base).epsilon(1e-15));
    }
}

TEST_CASE("continuous flat floor is playable") {
    RewardConfig cfg;
    CHECK(playable(flat_floor(), flat_floor(), cfg));
}

TEST_CASE("an entirely empty new segment is unplayable") {
    RewardConfig cfg;
    CHECK_FALSE(playable(flat_floor(), Segment(14, 16, '-'), cfg));
}

TEST_CASE("gap of exactly max_gap is clearable, one wider is not") {
    RewardConfig cfg;
    CHECK(playable(flat_floor(), floor_with_gap(4, cfg.max_gap), cfg));
    CHECK_FALSE(playable(flat_floor(), floor_with_gap(4, cfg.max_gap + 1), cfg));
}

TEST_CASE("up-steps above jump_height block the walker") {
    RewardConfig cfg;
    int rows = 14, cols = 16;
    Segment prev = flat_floor(rows, cols);
    // A wall the walker must climb in one step right at the boundary.
    auto wall_at_height = [&](int height) {
        Segment seg(rows, cols, '-');
        for (int c = 0; c < cols; ++c)
            for (int r = rows - 1; r > rows - 1 - height; --r) seg.at(r, c) = 'X';
        return seg;
    };
    CHECK(playable(prev, wall_at_height(cfg.jump_height + 1), cfg)); // rises jump_height rows
    CHECK_FALSE(playable(prev, wall_at_height(cfg.jump_height + 2), cfg));
}

TEST_CASE("adding ground to the bottom row never makes a level unplayable") {
    RewardConfig cfg;
    cfg.jump_height = 3;
    cfg.max_gap = 2;
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        Segment prev(6, 8, '-');
        Segment next(6, 8, '-');
        for (int c = 0; c < 8; ++c) {
            if (rng.next_unit() < 0.6) prev.at(5, c) = 'X';
            if (rng.next_unit() < 0.6) next.at(5, c) = 'X';
            if (rng.next_unit() < 0.2) next.at(3, c) = '#';
        }
        bool before = playable(prev, next, cfg);
        // fill one empty bottom cell with ground
        Segment filled = next;
        for (int c = 0; c < 8; ++c)
            if (filled.at(5, c) == '-') {
                filled.at(5, c) = 'X';
                break;
            }
        bool after = playable(prev, filled, cfg);
        if (before) CHECK(after);
    }
}

TEST_CASE("reward combines novelty and playability") {
    RewardConfig cfg;
    cfg.novelty_cap = 1.0;
    Segment floor = flat_floor();

    // playable, zero novelty, weights (1,1) -> 1.0
    CHECK(reward(floor, {floor, floor}, cfg) == doctest::Approx(1.0));

    // unplayable, novelty 1, weights (1,1) -> 0.0
    Segment empty(14, 16, '-');
    Segment full(14, 16, 'X'); // no standable cells except top row; walls everywhere
    std::vector<Segment> history = {full};
    // empty differs from full in every tile and has no footing
    CHECK(reward(empty, history, cfg) == doctest::Approx(0.0));

    // playable, novelty 0.5, weights (1, 0.5) -> 1.0
    RewardConfig cfg2;
    cfg2.novelty_cap = 1.0;
    cfg2.w_play = 0.5;
    Segment ground(14, 16, 'X');
    std::vector<Segment> hist2 = {ground, ground};
    Segment half = ground;
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 16; ++c) half.at(r, c) = '-';
    // novelty(half | {ground, ground}) = 0.5, playable(ground, half) = true
    CHECK(reward(half, hist2, cfg2) == doctest::Approx(0.5 + 0.5));
}

TEST_CASE("reward is bounded") {
    RewardConfig cfg;
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Segment seg = random_segment(rng);
        std::vector<Segment> history = {random_segment(rng), random_segment(rng)};
        double r = reward(seg, history, cfg);
        CHECK(r >= -cfg.w_play);
        CHECK(r <= cfg.w_novelty + cfg.w_play);
    }
}

TEST_CASE("reward rejects empty history") {
    RewardConfig cfg;
    CHECK_THROWS_AS(reward(Segment(4, 4, '-'), {}, cfg), std::invalid_argument);
}
