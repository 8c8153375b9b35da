#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "olg/designer.hpp"
#include "olg/mdp.hpp"

namespace olg {

struct TrainConfig {
    long long total_steps = 5000; // environment steps, episodes of length h
    double learning_rate = 1e-3;
    bool mean_return_baseline = true;
    double sigma = 0.2;        // exploration std-dev during training
    int hidden = 64;
    double init_scale = 0.45;  // see PolicyNetwork::random_init
    std::uint64_t seed = 0;

    void validate() const {
        if (total_steps < 1) throw std::invalid_argument("TrainConfig: total_steps must be >= 1");
        if (learning_rate <= 0.0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
        if (sigma <= 0.0) throw std::invalid_argument("TrainConfig: sigma must be > 0");
        if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
    }
};

struct TrainResult {
    Designer designer;                 // sigma = 0, ready for evaluation
    std::vector<double> learning_curve; // per-episode undiscounted mean reward
};

// Episodic REINFORCE with discount gamma and an optional mean-return
// baseline. Episodes have length h; training runs until total_steps
// environment steps have been consumed. Deterministic given the seed.
inline TrainResult train(const Decoder& decoder, const RewardConfig& reward_cfg,
                         const EpisodeConfig& episode, const TrainConfig& cfg) {
    cfg.validate();
    episode.validate();

    Rng init_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(0x1217)));
    PolicyNetwork net = PolicyNetwork::random_init(episode.n * episode.d, cfg.hidden,
                                                   episode.d, cfg.init_scale, init_rng);
    net.sigma = cfg.sigma;

    TrainResult result;
    long long consumed = 0;
    std::uint64_t episode_index = 0;
    while (consumed < cfg.total_steps) {
        Rng rng(mix_seed(cfg.seed, 0x9000 + episode_index));
        ++episode_index;

        Designer dz = Designer::neural(net);
        Trajectory traj = rollout(dz, decoder, reward_cfg, episode, episode.h, rng);
        consumed += episode.h;

        // Discounted returns-to-go.
        std::vector<double> returns(traj.rewards.size());
        double acc = 0.0;
        for (std::size_t i = traj.rewards.size(); i-- > 0;) {
            acc = traj.rewards[i] + episode.gamma * acc;
            returns[i] = acc;
        }
        double baseline = 0.0;
        if (cfg.mean_return_baseline && !returns.empty())
            baseline = std::accumulate(returns.begin(), returns.end(), 0.0) /
                       static_cast<double>(returns.size());

        PolicyGradient grad = PolicyGradient::zeros_like(net);
        auto states = extract_states(traj, episode);
        for (std::size_t i = 0; i < traj.actions.size(); ++i) {
            // states[i] is the observation before action i.
            PolicyGradient g = grad_log_prob(net, states[i].second, traj.actions[i]);
            grad.axpy(returns[i] - baseline, g);
        }
        apply_gradient(net, grad, cfg.learning_rate / static_cast<double>(traj.actions.size()));
        if (!net.finite())
            throw std::runtime_error("train: diverged, non-finite network weight");

        result.learning_curve.push_back(
            std::accumulate(traj.rewards.begin(), traj.rewards.end(), 0.0) /
            static_cast<double>(traj.rewards.size()));
    }

    net.sigma = 0.0; // deterministic evaluation policy
    result.designer = Designer::neural(std::move(net));
    return result;
}

} // namespace olg
