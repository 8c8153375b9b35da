#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace olg {

// SplitMix64 stream. All randomness in the project flows through this
// generator so that results are reproducible across platforms and standard
// library implementations (std::uniform_real_distribution is not portable).
//
// next_u64: s += 0x9e3779b97f4a7c15; z = s;
//           z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//           z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
//           return z ^ (z >> 31);
// next_unit: top 53 bits of next_u64 scaled to [0, 1).
// next_symmetric: 2 * next_unit - 1, i.e. [-1, 1).
// next_gaussian: Box-Muller from two fresh uniforms (no cached spare).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    double next_gaussian() {
        double u1 = next_unit();
        double u2 = next_unit();
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [0, bound) by rejection, bias-free.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            std::uint64_t v = next_u64();
            if (v >= threshold) return v % bound;
        }
    }

private:
    std::uint64_t state_;
};

// Deterministic seed fan-out: derives an independent stream seed from a
// parent seed and a tag. Adding new tags never perturbs existing streams.
inline std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t tag) {
    Rng r(parent ^ (tag * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t parent, double tag) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(tag));
    std::memcpy(&bits, &tag, sizeof(bits));
    return mix_seed(parent, bits);
}

} // namespace olg
