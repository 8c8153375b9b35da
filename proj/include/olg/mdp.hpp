#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "olg/decoder.hpp"
#include "olg/designer.hpp"
#include "olg/latent.hpp"
#include "olg/reward.hpp"
#include "olg/rng.hpp"

namespace olg {

// One finished episode: n initial latents, the chosen actions, per-step
// rewards and the decoded segments (n + steps of them).
struct Trajectory {
    int n = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<LatentVector> initial_latents; // n
    std::vector<LatentVector> actions;         // steps
    std::vector<double> rewards;               // steps
    std::vector<Segment> segments;             // n + steps

    int steps() const { return static_cast<int>(actions.size()); }

    // Initial latents followed by actions: the full latent sequence.
    std::vector<LatentVector> latents() const {
        std::vector<LatentVector> all = initial_latents;
        all.insert(all.end(), actions.begin(), actions.end());
        return all;
    }

    void validate() const {
        if (segments.size() != initial_latents.size() + actions.size())
            throw std::invalid_argument("Trajectory: segment count mismatch");
        if (rewards.size() != actions.size())
            throw std::invalid_argument("Trajectory: reward count mismatch");
    }
};

// Run the MDP loop for `steps` steps: observe window, pick action, decode,
// score against the n most recent segments. Pure given (designer, decoder,
// reward, seed), so many rollouts can run in parallel with per-rollout rngs.
inline Trajectory rollout(const Designer& designer, const Decoder& decoder,
                          const RewardConfig& reward_cfg, const EpisodeConfig& config,
                          int steps, Rng& rng) {
    config.validate();
    if (steps < 1) throw std::invalid_argument("rollout: steps must be >= 1");
    if (designer.d != decoder.d() || designer.d != config.d)
        throw std::invalid_argument("rollout: designer/decoder dimension mismatch");

    Trajectory traj;
    traj.n = config.n;
    traj.d = config.d;
    traj.seed = config.seed;

    DesignerState state = initial_state(config, rng);
    traj.initial_latents = state.window;
    for (const auto& z : state.window) traj.segments.push_back(decoder.decode(z));

    for (int i = 0; i < steps; ++i) {
        LatentVector action = designer.act(state, i, rng);
        Segment seg = decoder.decode(action);
        std::vector<Segment> history(traj.segments.end() - config.n, traj.segments.end());
        traj.rewards.push_back(reward(seg, history, reward_cfg));
        traj.segments.push_back(std::move(seg));
        traj.actions.push_back(action);
        state = transition(state, traj.actions.back());
    }
    return traj;
}

// One DesignerState per window position over the latent sequence; the window
// at position 0 covers the initial latents. Count is steps + 1.
inline std::vector<std::pair<int, DesignerState>> extract_states(const Trajectory& traj,
                                                                 const EpisodeConfig& config) {
    traj.validate();
    std::vector<LatentVector> all = traj.latents();
    if (static_cast<int>(all.size()) < config.n)
        throw std::invalid_argument("extract_states: trajectory shorter than window");
    std::vector<std::pair<int, DesignerState>> out;
    for (std::size_t start = 0; start + config.n <= all.size(); ++start) {
        DesignerState s;
        s.window.assign(all.begin() + static_cast<std::ptrdiff_t>(start),
                        all.begin() + static_cast<std::ptrdiff_t>(start + config.n));
        out.emplace_back(static_cast<int>(start), std::move(s));
    }
    return out;
}

// Line-oriented trajectory record. Latents are printed with 17 significant
// digits so the round trip is lossless.
//   trajectory n=<n> d=<d> steps=<k> seed=<seed>
//   latent <d components>          (n + k lines, initial latents first)
//   rewards <k values>
inline void save_trajectory(std::ostream& out, const Trajectory& traj) {
    traj.validate();
    out.precision(17);
    out << "trajectory n=" << traj.n << " d=" << traj.d << " steps=" << traj.steps()
        << " seed=" << traj.seed << '\n';
    auto dump = [&](const LatentVector& z) {
        out << "latent";
        for (double v : z) out << ' ' << v;
        out << '\n';
    };
    for (const auto& z : traj.initial_latents) dump(z);
    for (const auto& z : traj.actions) dump(z);
    out << "rewards";
    for (double r : traj.rewards) out << ' ' << r;
    out << '\n';
}

inline Trajectory load_trajectory(std::istream& in, const Decoder* decoder = nullptr) {
    auto expect_kv = [](std::istream& s, const std::string& key) -> unsigned long long {
        std::string tok;
        if (!(s >> tok) || tok.rfind(key + "=", 0) != 0)
            throw std::invalid_argument("load_trajectory: expected " + key + "=");
        return std::stoull(tok.substr(key.size() + 1));
    };
    std::string tag;
    if (!(in >> tag) || tag != "trajectory")
        throw std::invalid_argument("load_trajectory: bad header");
    Trajectory traj;
    traj.n = static_cast<int>(expect_kv(in, "n"));
    traj.d = static_cast<int>(expect_kv(in, "d"));
    int steps = static_cast<int>(expect_kv(in, "steps"));
    traj.seed = static_cast<std::uint64_t>(expect_kv(in, "seed"));
    for (int i = 0; i < traj.n + steps; ++i) {
        if (!(in >> tag) || tag != "latent")
            throw std::invalid_argument("load_trajectory: expected latent line");
        LatentVector z(static_cast<std::size_t>(traj.d));
        for (double& v : z)
            if (!(in >> v)) throw std::invalid_argument("load_trajectory: truncated latent");
        if (i < traj.n) traj.initial_latents.push_back(std::move(z));
        else traj.actions.push_back(std::move(z));
    }
    if (!(in >> tag) || tag != "rewards")
        throw std::invalid_argument("load_trajectory: expected rewards line");
    traj.rewards.resize(static_cast<std::size_t>(steps));
    for (double& r : traj.rewards)
        if (!(in >> r)) throw std::invalid_argument("load_trajectory: truncated rewards");
    if (decoder) {
        for (const auto& z : traj.latents()) traj.segments.push_back(decoder->decode(z));
        traj.validate();
    }
    return traj;
}

} // namespace olg
