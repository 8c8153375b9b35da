#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "olg/latent.hpp"
#include "olg/rng.hpp"
#include "olg/segment.hpp"

namespace olg {

// Snap each component to the nearest of `levels` uniformly spaced points in
// [-1, 1]. Idempotent; makes the state space finite for the exact SSC oracle.
inline LatentVector quantize(const LatentVector& z, int levels) {
    if (levels < 2) throw std::invalid_argument("quantize: levels must be >= 2");
    LatentVector out(z.size());
    double step = 2.0 / (levels - 1);
    for (std::size_t i = 0; i < z.size(); ++i) {
        double v = z[i];
        if (v < -1.0) v = -1.0;
        if (v > 1.0) v = 1.0;
        long idx = std::lround((v + 1.0) / step);
        out[i] = -1.0 + static_cast<double>(idx) * step;
    }
    return out;
}

// Grid points a quantizer can emit, in ascending order.
inline std::vector<double> quantize_grid(int levels) {
    std::vector<double> grid(static_cast<std::size_t>(levels));
    double step = 2.0 / (levels - 1);
    for (int i = 0; i < levels; ++i) grid[static_cast<std::size_t>(i)] = -1.0 + i * step;
    return grid;
}

struct DecoderSpec {
    enum class Kind { Linear, Bank };
    Kind kind = Kind::Linear;
    int d = 8;
    int rows = 14;
    int cols = 16;
    std::uint64_t weights_seed = 0;      // linear kind
    std::vector<Segment> bank;           // bank kind: prototype segments
    std::vector<LatentVector> anchors;   // bank kind: one anchor per prototype

    void validate() const {
        if (d < 1 || rows < 1 || cols < 1) throw std::invalid_argument("DecoderSpec: bad dims");
        if (kind == Kind::Bank) {
            if (bank.size() < 2) throw std::invalid_argument("DecoderSpec: bank needs >= 2 prototypes");
            if (bank.size() != anchors.size())
                throw std::invalid_argument("DecoderSpec: anchor/prototype count mismatch");
            for (std::size_t i = 0; i < anchors.size(); ++i) {
                if (static_cast<int>(anchors[i].size()) != d)
                    throw std::invalid_argument("DecoderSpec: anchor dimension mismatch");
                for (std::size_t j = i + 1; j < anchors.size(); ++j)
                    if (anchors[i] == anchors[j])
                        throw std::invalid_argument("DecoderSpec: duplicate anchors");
            }
        }
    }
};

// Deterministic stand-in for the pre-trained GAN: a fixed seeded linear map
// from the latent space to per-cell tile logits, followed by argmax with ties
// broken toward the lowest alphabet index. Smooth in z except on tie sets.
class LinearDecoder {
public:
    explicit LinearDecoder(const DecoderSpec& spec)
        : d_(spec.d), rows_(spec.rows), cols_(spec.cols) {
        int logits = rows_ * cols_ * static_cast<int>(kTileAlphabet.size());
        weights_.resize(static_cast<std::size_t>(logits) * d_);
        bias_.resize(static_cast<std::size_t>(logits));
        Rng rng(mix_seed(spec.weights_seed, static_cast<std::uint64_t>(0x11ea12)));
        for (double& w : weights_) w = rng.next_symmetric();
        for (double& b : bias_) b = 0.25 * rng.next_symmetric();
    }

    int d() const { return d_; }

    std::vector<double> logits(const LatentVector& z) const {
        if (static_cast<int>(z.size()) != d_)
            throw std::invalid_argument("LinearDecoder: latent dimension mismatch");
        std::vector<double> out(bias_);
        const double* w = weights_.data();
        for (std::size_t i = 0; i < out.size(); ++i) {
            double acc = out[i];
            for (int j = 0; j < d_; ++j) acc += w[j] * z[static_cast<std::size_t>(j)];
            out[i] = acc;
            w += d_;
        }
        return out;
    }

    // Weight rows for one cell's logits, used by tests to bound the margin.
    const std::vector<double>& weights() const { return weights_; }

    Segment decode(const LatentVector& z) const {
        std::vector<double> lg = logits(z);
        Segment seg(rows_, cols_);
        int alpha = static_cast<int>(kTileAlphabet.size());
        for (int cell = 0; cell < rows_ * cols_; ++cell) {
            int best = 0;
            double best_v = lg[static_cast<std::size_t>(cell) * alpha];
            for (int a = 1; a < alpha; ++a) {
                double v = lg[static_cast<std::size_t>(cell) * alpha + a];
                if (v > best_v) {
                    best_v = v;
                    best = a;
                }
            }
            seg.cells[static_cast<std::size_t>(cell)] = kTileAlphabet[static_cast<std::size_t>(best)];
        }
        return seg;
    }

private:
    int d_, rows_, cols_;
    std::vector<double> weights_; // (rows*cols*|alphabet|) x d, row-major
    std::vector<double> bias_;
};

// Finite-support stand-in: returns the prototype whose anchor is nearest in
// Euclidean distance, ties broken by lowest anchor index. Composed with
// quantize this yields a finite image, which the exact SSC oracle needs.
class BankDecoder {
public:
    explicit BankDecoder(DecoderSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        if (spec_.kind != DecoderSpec::Kind::Bank)
            throw std::invalid_argument("BankDecoder: spec kind is not bank");
    }

    int d() const { return spec_.d; }

    Segment decode(const LatentVector& z) const {
        if (z.size() != static_cast<std::size_t>(spec_.d))
            throw std::invalid_argument("BankDecoder: latent dimension mismatch");
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < spec_.anchors.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j) {
                double diff = z[j] - spec_.anchors[i][j];
                acc += diff * diff;
            }
            if (acc < best_d) {
                best_d = acc;
                best = i;
            }
        }
        return spec_.bank[best];
    }

private:
    DecoderSpec spec_;
};

// Uniform decode interface for rollouts.
class Decoder {
public:
    explicit Decoder(const DecoderSpec& spec) : spec_(spec) {
        spec_.validate();
        if (spec_.kind == DecoderSpec::Kind::Linear)
            linear_ = std::make_shared<LinearDecoder>(spec_);
        else
            bank_ = std::make_shared<BankDecoder>(spec_);
    }

    int d() const { return spec_.d; }
    const DecoderSpec& spec() const { return spec_; }

    Segment decode(const LatentVector& z) const {
        return linear_ ? linear_->decode(z) : bank_->decode(z);
    }

    const LinearDecoder& linear() const {
        if (!linear_) throw std::logic_error("Decoder: not a linear decoder");
        return *linear_;
    }

private:
    DecoderSpec spec_;
    std::shared_ptr<LinearDecoder> linear_;
    std::shared_ptr<BankDecoder> bank_;
};

// Bank file: anchor table header, then one level-text prototype per anchor.
//   bank <M> <d>
//   anchor <v_1> ... <v_d>        (M lines)
//   <M single-segment level texts>
inline void save_bank(std::ostream& out, const DecoderSpec& spec) {
    out << "bank " << spec.bank.size() << ' ' << spec.d << '\n';
    out.precision(17);
    for (const auto& a : spec.anchors) {
        out << "anchor";
        for (double v : a) out << ' ' << v;
        out << '\n';
    }
    for (const auto& seg : spec.bank) out << level_to_text({seg});
}

inline DecoderSpec load_bank(std::istream& in, int rows, int cols) {
    std::string tag;
    std::size_t m = 0;
    DecoderSpec spec;
    spec.kind = DecoderSpec::Kind::Bank;
    spec.rows = rows;
    spec.cols = cols;
    if (!(in >> tag >> m >> spec.d) || tag != "bank")
        throw std::invalid_argument("load_bank: bad header");
    for (std::size_t i = 0; i < m; ++i) {
        if (!(in >> tag) || tag != "anchor") throw std::invalid_argument("load_bank: bad anchor line");
        LatentVector a(static_cast<std::size_t>(spec.d));
        for (double& v : a)
            if (!(in >> v)) throw std::invalid_argument("load_bank: truncated anchor");
        spec.anchors.push_back(std::move(a));
    }
    std::string line;
    std::getline(in, line); // consume end of last anchor line
    for (std::size_t i = 0; i < m; ++i) {
        std::string text;
        int content_rows = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            text += line;
            text += '\n';
            if (line[0] == '+') break;
            ++content_rows;
        }
        Level lv = text_to_level(text);
        if (lv.size() != 1) throw std::invalid_argument("load_bank: prototype must be one segment");
        spec.bank.push_back(lv.front());
    }
    spec.validate();
    return spec;
}

} // namespace olg
