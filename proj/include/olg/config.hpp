#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "olg/decoder.hpp"
#include "olg/latent.hpp"
#include "olg/reward.hpp"
#include "olg/train.hpp"

namespace olg {

struct EvaluationConfig {
    int num_levels = 100;
    int mnd_repeats = 30;
    int pair_count = 1000;
    int k = 10;
    double epsilon = 0.0; // 0 means the default 0.05 * sqrt(n*d), resolved per cell
    double delta = 0.01;

    void validate() const {
        if (num_levels < 2) throw std::invalid_argument("evaluation: num_levels must be >= 2");
        if (mnd_repeats < 1) throw std::invalid_argument("evaluation: mnd_repeats must be >= 1");
        if (pair_count < 1) throw std::invalid_argument("evaluation: pair_count must be >= 1");
        if (k < 1) throw std::invalid_argument("evaluation: k must be >= 1");
        if (epsilon < 0.0) throw std::invalid_argument("evaluation: epsilon must be >= 0");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("evaluation: delta must be in (0,1)");
    }
};

struct ExperimentConfig {
    EpisodeConfig episode;
    DecoderSpec decoder;
    RewardConfig reward;
    TrainConfig train;
    std::vector<double> grid_gammas;
    std::vector<int> grid_ns;
    EvaluationConfig evaluation;
    std::string output_dir = "out";
    std::uint64_t master_seed = 1;

    void validate() const {
        episode.validate();
        decoder.validate();
        reward.validate();
        train.validate();
        evaluation.validate();
        if (grid_gammas.empty() || grid_ns.empty())
            throw std::invalid_argument("grid: gammas and ns must be nonempty");
        for (double g : grid_gammas)
            if (!(g > 0.0 && g <= 1.0)) throw std::invalid_argument("grid: gamma out of (0,1]");
        for (int n : grid_ns)
            if (n < 1 || n >= episode.h) throw std::invalid_argument("grid: n out of [1,h)");
    }

    double resolved_epsilon(int n) const {
        if (evaluation.epsilon > 0.0) return evaluation.epsilon;
        return 0.05 * std::sqrt(static_cast<double>(n) * episode.d);
    }
};

namespace config_detail {

inline void check_keys(const nlohmann::json& obj, const std::string& block,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw std::invalid_argument("config: " + block + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + block);
}

template <typename T>
T get_or(const nlohmann::json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<T>();
}

} // namespace config_detail

// Single structured config file with named blocks; unknown keys are errors.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using config_detail::check_keys;
    using config_detail::get_or;

    check_keys(j, "top level",
               {"master_seed", "output_dir", "episode", "decoder", "reward", "train", "grid",
                "evaluation"});
    ExperimentConfig cfg;
    cfg.master_seed = get_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);

    if (j.contains("episode")) {
        const auto& e = j.at("episode");
        check_keys(e, "episode", {"n", "h", "eval_steps", "gamma", "d"});
        cfg.episode.n = get_or(e, "n", cfg.episode.n);
        cfg.episode.h = get_or(e, "h", cfg.episode.h);
        cfg.episode.gamma = get_or(e, "gamma", cfg.episode.gamma);
        cfg.episode.d = get_or(e, "d", cfg.episode.d);
        cfg.episode.eval_steps = get_or(e, "eval_steps", 2 * cfg.episode.h);
    }
    cfg.episode.seed = cfg.master_seed;

    cfg.decoder.d = cfg.episode.d;
    if (j.contains("decoder")) {
        const auto& dj = j.at("decoder");
        check_keys(dj, "decoder", {"kind", "H", "W", "weights_seed", "bank_path"});
        std::string kind = get_or<std::string>(dj, "kind", "linear");
        cfg.decoder.rows = get_or(dj, "H", cfg.decoder.rows);
        cfg.decoder.cols = get_or(dj, "W", cfg.decoder.cols);
        if (kind == "linear") {
            cfg.decoder.kind = DecoderSpec::Kind::Linear;
            cfg.decoder.weights_seed = get_or<std::uint64_t>(dj, "weights_seed", 0);
        } else if (kind == "bank") {
            std::string path = dj.at("bank_path").get<std::string>();
            std::ifstream in(path);
            if (!in) throw std::invalid_argument("config: cannot open bank file " + path);
            cfg.decoder = load_bank(in, cfg.decoder.rows, cfg.decoder.cols);
        } else {
            throw std::invalid_argument("config: decoder kind must be linear or bank");
        }
    }

    if (j.contains("reward")) {
        const auto& r = j.at("reward");
        check_keys(r, "reward", {"w_novelty", "w_play", "novelty_cap", "jump_height", "max_gap"});
        cfg.reward.w_novelty = get_or(r, "w_novelty", cfg.reward.w_novelty);
        cfg.reward.w_play = get_or(r, "w_play", cfg.reward.w_play);
        cfg.reward.novelty_cap = get_or(r, "novelty_cap", cfg.reward.novelty_cap);
        cfg.reward.jump_height = get_or(r, "jump_height", cfg.reward.jump_height);
        cfg.reward.max_gap = get_or(r, "max_gap", cfg.reward.max_gap);
    }
    cfg.reward.n = cfg.episode.n;

    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, "train",
                   {"total_steps", "learning_rate", "baseline", "sigma", "hidden", "init_scale"});
        cfg.train.total_steps = get_or(t, "total_steps", cfg.train.total_steps);
        cfg.train.learning_rate = get_or(t, "learning_rate", cfg.train.learning_rate);
        cfg.train.sigma = get_or(t, "sigma", cfg.train.sigma);
        cfg.train.hidden = get_or(t, "hidden", cfg.train.hidden);
        cfg.train.init_scale = get_or(t, "init_scale", cfg.train.init_scale);
        std::string baseline = get_or<std::string>(t, "baseline", "mean-return");
        if (baseline == "mean-return") cfg.train.mean_return_baseline = true;
        else if (baseline == "none") cfg.train.mean_return_baseline = false;
        else throw std::invalid_argument("config: train.baseline must be mean-return or none");
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, "grid", {"gammas", "ns"});
        cfg.grid_gammas = g.at("gammas").get<std::vector<double>>();
        cfg.grid_ns = g.at("ns").get<std::vector<int>>();
    } else {
        cfg.grid_gammas = {cfg.episode.gamma};
        cfg.grid_ns = {cfg.episode.n};
    }

    if (j.contains("evaluation")) {
        const auto& e = j.at("evaluation");
        check_keys(e, "evaluation",
                   {"num_levels", "mnd_repeats", "pair_count", "k", "epsilon", "delta"});
        cfg.evaluation.num_levels = get_or(e, "num_levels", cfg.evaluation.num_levels);
        cfg.evaluation.mnd_repeats = get_or(e, "mnd_repeats", cfg.evaluation.mnd_repeats);
        cfg.evaluation.pair_count = get_or(e, "pair_count", cfg.evaluation.pair_count);
        cfg.evaluation.k = get_or(e, "k", cfg.evaluation.k);
        cfg.evaluation.epsilon = get_or(e, "epsilon", cfg.evaluation.epsilon);
        cfg.evaluation.delta = get_or(e, "delta", cfg.evaluation.delta);
    }

    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

} // namespace olg
