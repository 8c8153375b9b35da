#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "olg/decoder.hpp"
#include "olg/rng.hpp"
#include "olg/segment.hpp"

using namespace olg;

namespace {

DecoderSpec linear_spec(int d, std::uint64_t seed, int rows = 14, int cols = 16) {
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::Linear;
    spec.d = d;
    spec.rows = rows;
    spec.cols = cols;
    spec.weights_seed = seed;
    return spec;
}

DecoderSpec tiny_bank() {
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::Bank;
    spec.d = 1;
    spec.rows = 2;
    spec.cols = 2;
    spec.bank = {Segment(2, 2, '-'), Segment(2, 2, 'X'), Segment(2, 2, '#')};
    spec.anchors = {{-1.0}, {0.0}, {1.0}};
    return spec;
}

} // namespace

TEST_CASE("decode_linear is deterministic") {
    LinearDecoder dec(linear_spec(4, 0));
    LatentVector z = {0.3, -0.2, 0.8, 0.0};
    CHECK(dec.decode(z) == dec.decode(z));
}

TEST_CASE("decode_linear is locally constant below the logit margin") {
    DecoderSpec spec = linear_spec(4, 7);
    LinearDecoder dec(spec);
    LatentVector z = {0.25, -0.4, 0.6, -0.1};
    Segment base = dec.decode(z);

    // Smallest winner-runner-up margin across cells, and the worst-case
    // sensitivity of any logit difference to a latent perturbation.
    std::vector<double> lg = dec.logits(z);
    int alpha = static_cast<int>(kTileAlphabet.size());
    int cells = spec.rows * spec.cols;
    double margin = 1e300;
    for (int cell = 0; cell < cells; ++cell) {
        double best = -1e300, second = -1e300;
        for (int a = 0; a < alpha; ++a) {
            double v = lg[static_cast<std::size_t>(cell) * alpha + a];
            if (v > best) {
                second = best;
                best = v;
            } else if (v > second) {
                second = v;
            }
        }
        margin = std::min(margin, best - second);
    }
    REQUIRE(margin > 0.0);
    double max_pair_norm = 0.0;
    const auto& w = dec.weights();
    for (int cell = 0; cell < cells; ++cell)
        for (int a = 0; a < alpha; ++a)
            for (int b = a + 1; b < alpha; ++b) {
                double acc = 0.0;
                for (int j = 0; j < spec.d; ++j) {
                    double diff = w[(static_cast<std::size_t>(cell) * alpha + a) * spec.d + j] -
                                  w[(static_cast<std::size_t>(cell) * alpha + b) * spec.d + j];
                    acc += diff * diff;
                }
                max_pair_norm = std::max(max_pair_norm, std::sqrt(acc));
            }
    double delta = margin / (2.0 * max_pair_norm);

    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        LatentVector dir(z.size());
        double norm = 0.0;
        for (double& c : dir) {
            c = rng.next_gaussian();
            norm += c * c;
        }
        norm = std::sqrt(norm);
        LatentVector z2 = z;
        for (std::size_t i = 0; i < z.size(); ++i) z2[i] += 0.5 * delta * dir[i] / norm;
        CHECK(dec.decode(z2) == base);
    }
}

TEST_CASE("decode_linear distinguishes opposite corners of the latent cube") {
    LinearDecoder dec(linear_spec(8, 0));
    LatentVector lo(8, -1.0), hi(8, 1.0);
    Segment a = dec.decode(lo);
    Segment b = dec.decode(hi);
    int diff = 0;
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        if (a.cells[i] != b.cells[i]) ++diff;
    CHECK(diff >= 1);
}

TEST_CASE("decode_linear rejects dimension mismatch") {
    LinearDecoder dec(linear_spec(4, 0));
    CHECK_THROWS_AS(dec.decode(LatentVector{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("decode_bank returns the prototype of the nearest anchor") {
    BankDecoder dec(tiny_bank());
    CHECK(dec.decode({-1.0}) == Segment(2, 2, '-')); // exact anchor
    CHECK(dec.decode({0.4}) == Segment(2, 2, 'X'));  // middle anchor nearest
    CHECK(dec.decode({0.9}) == Segment(2, 2, '#'));
}

TEST_CASE("decode_bank breaks ties toward the lowest anchor index") {
    DecoderSpec spec = tiny_bank();
    spec.anchors = {{-0.5}, {0.5}};
    spec.bank = {Segment(2, 2, '-'), Segment(2, 2, 'X')};
    BankDecoder dec(spec);
    CHECK(dec.decode({0.0}) == Segment(2, 2, '-'));
}

TEST_CASE("bank spec validation rejects duplicates and tiny banks") {
    DecoderSpec spec = tiny_bank();
    spec.anchors[1] = spec.anchors[0];
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = tiny_bank();
    spec.bank.resize(1);
    spec.anchors.resize(1);
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("quantize snaps to the nearest grid point") {
    CHECK(quantize({0.3, -0.9}, 2) == LatentVector{1.0, -1.0});
    CHECK(quantize({0.4}, 3) == LatentVector{0.0});
    CHECK(quantize({0.6}, 3) == LatentVector{1.0});
}

TEST_CASE("quantize is idempotent") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        LatentVector z(4);
        for (double& c : z) c = rng.next_symmetric();
        for (int levels : {2, 3, 5, 7}) {
            LatentVector q = quantize(z, levels);
            CHECK(quantize(q, levels) == q);
        }
    }
}

TEST_CASE("quantize rejects fewer than two levels") {
    CHECK_THROWS_AS(quantize({0.0}, 1), std::invalid_argument);
}

TEST_CASE("bank decoder composed with quantize has a finite image") {
    DecoderSpec spec = tiny_bank();
    spec.d = 2;
    spec.anchors = {{-1.0, -1.0}, {0.0, 0.5}, {1.0, -0.5}};
    BankDecoder dec(spec);
    std::set<std::string> image;
    auto grid = quantize_grid(5);
    for (double x : grid)
        for (double y : grid) image.insert(dec.decode(quantize({x, y}, 5)).cells);
    CHECK(image.size() <= spec.bank.size());
}

TEST_CASE("level text round-trips") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        Level level;
        int segments = 1 + static_cast<int>(rng.next_below(4));
        for (int s = 0; s < segments; ++s) {
            Segment seg(5, 6);
            for (char& c : seg.cells)
                c = kTileAlphabet[static_cast<std::size_t>(rng.next_below(kTileAlphabet.size()))];
            level.push_back(seg);
        }
        CHECK(text_to_level(level_to_text(level)) == level);
    }
}

TEST_CASE("all-empty single-segment level renders as dashes") {
    Level level = {Segment(3, 4, '-')};
    CHECK(level_to_text(level) == "----\n----\n----\n+===\n");
}

TEST_CASE("text_to_level rejects unknown tiles and ragged rows") {
    CHECK_THROWS_AS(text_to_level("-Q\n--\n+=\n"), std::invalid_argument);
    CHECK_THROWS_AS(text_to_level("---\n--\n+==\n"), std::invalid_argument);
}

TEST_CASE("bank file round-trips") {
    DecoderSpec spec = tiny_bank();
    spec.bank[0].at(1, 0) = 'X';
    std::stringstream buffer;
    save_bank(buffer, spec);
    DecoderSpec loaded = load_bank(buffer, spec.rows, spec.cols);
    CHECK(loaded.d == spec.d);
    CHECK(loaded.bank == spec.bank);
    CHECK(loaded.anchors == spec.anchors);
}
