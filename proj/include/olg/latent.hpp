#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "olg/rng.hpp"

namespace olg {

// A latent vector is both an action and one unit of state. Components live
// in [-1, 1]; out-of-range values are clamped at the designer boundary.
using LatentVector = std::vector<double>;

inline void clamp_latent(LatentVector& z) {
    for (double& c : z) {
        if (c < -1.0) c = -1.0;
        if (c > 1.0) c = 1.0;
    }
}

inline LatentVector sample_latent(int d, Rng& rng) {
    LatentVector z(static_cast<std::size_t>(d));
    for (double& c : z) c = rng.next_symmetric();
    return z;
}

// Window of the n most recent latent vectors, oldest first. This is the MDP
// state s_i.
struct DesignerState {
    std::vector<LatentVector> window;

    int n() const { return static_cast<int>(window.size()); }
    int d() const { return window.empty() ? 0 : static_cast<int>(window.front().size()); }

    // Concatenation of the window, dimension n*d.
    std::vector<double> flat() const {
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(n()) * static_cast<std::size_t>(d()));
        for (const auto& z : window) out.insert(out.end(), z.begin(), z.end());
        return out;
    }

    bool operator==(const DesignerState& other) const { return window == other.window; }
    bool operator<(const DesignerState& other) const { return window < other.window; }
};

struct EpisodeConfig {
    int n = 4;            // memory window
    int h = 25;           // training horizon
    int eval_steps = 50;  // evaluation episode length, default 2h
    double gamma = 0.9;   // discount
    int d = 8;            // latent dimension
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("EpisodeConfig: n must be positive");
        if (h < 1) throw std::invalid_argument("EpisodeConfig: h must be positive");
        if (n >= h) throw std::invalid_argument("EpisodeConfig: n must be < h");
        if (eval_steps < h) throw std::invalid_argument("EpisodeConfig: eval_steps must be >= h");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw std::invalid_argument("EpisodeConfig: gamma must be in (0,1]");
        if (d < 1) throw std::invalid_argument("EpisodeConfig: d must be positive");
    }
};

// Initial state: n latent vectors sampled i.i.d. uniformly from [-1,1]^d.
inline DesignerState initial_state(const EpisodeConfig& config, Rng& rng) {
    config.validate();
    DesignerState s;
    s.window.reserve(static_cast<std::size_t>(config.n));
    for (int i = 0; i < config.n; ++i) s.window.push_back(sample_latent(config.d, rng));
    return s;
}

// Drop the oldest latent, append the action. Input state is unmodified.
inline DesignerState transition(const DesignerState& state, const LatentVector& action) {
    if (state.d() != static_cast<int>(action.size()))
        throw std::invalid_argument("transition: action dimension mismatch");
    DesignerState next;
    next.window.assign(state.window.begin() + 1, state.window.end());
    next.window.push_back(action);
    return next;
}

} // namespace olg
