#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "olg/config.hpp"
#include "olg/decoder.hpp"
#include "olg/designer.hpp"
#include "olg/mdp.hpp"
#include "olg/metrics.hpp"
#include "olg/ssc.hpp"
#include "olg/svg_plot.hpp"
#include "olg/train.hpp"

namespace olg {

namespace fs = std::filesystem;

struct CellId {
    double gamma = 0.9;
    int n = 4;

    std::string name() const {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "gamma%.2f_n%d", gamma, n);
        return buf;
    }
};

// Per-cell seed fan-out: mixing the master seed with the cell coordinates so
// adding a cell never perturbs other cells' results.
inline std::uint64_t cell_seed(std::uint64_t master, const CellId& cell) {
    return mix_seed(mix_seed(master, cell.gamma), static_cast<std::uint64_t>(cell.n));
}

inline std::string format_csv_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("csv: missing column " + name);
    }

    std::vector<double> numeric_column(const std::string& name) const {
        std::size_t idx = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(std::stod(row.at(idx)));
        return out;
    }

    std::vector<std::string> text_column(const std::string& name) const {
        std::size_t idx = column(name);
        std::vector<std::string> out;
        out.reserve(rows.size());
        for (const auto& row : rows) out.push_back(row.at(idx));
        return out;
    }
};

inline CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> fields;
        std::stringstream ss(s);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        return fields;
    };
    if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file " + path.string());
    table.header = split(line);
    while (std::getline(in, line))
        if (!line.empty()) table.rows.push_back(split(line));
    if (table.rows.empty()) throw std::invalid_argument("csv: no data rows in " + path.string());
    return table;
}

// ---------------------------------------------------------------------------
// Grid runner. Artifact layout, per run directory:
//   status.csv                      cell,stage,status,message
//   summary.csv                     Table-style aggregation across cells
//   cell_<name>/checkpoint.txt      designer checkpoint
//   cell_<name>/learning_curve.csv  episode,mean_reward
//   cell_<name>/levels/level_XXX.txt
//   cell_<name>/trajectories/trajectory_XXX.txt
//   cell_<name>/closure_report.txt  ssc report (epsilon-coverage form)
//   cell_<name>/state_counts.csv    step,samples
//   cell_<name>/scatter.csv         x,y,category     (+ scatter.svg)
//   cell_<name>/mnd_per_step.csv    step,mean,std    (+ mnd_per_step.svg)
//   cell_<name>/reward_per_step.csv step,mean,std    (+ reward_per_step.svg)
//   cell_<name>/div_report.csv      d_M,mean_pairwise,div,pair_count
//   cell_<name>/interval_rewards.csv interval_lo,interval_hi,mean_reward
// ---------------------------------------------------------------------------
class Harness {
public:
    Harness(ExperimentConfig config, fs::path run_dir)
        : cfg_(std::move(config)), run_dir_(std::move(run_dir)) {
        cfg_.validate();
        fs::create_directories(run_dir_);
    }

    const fs::path& run_dir() const { return run_dir_; }

    std::vector<CellId> cells() const {
        std::vector<CellId> out;
        for (int n : cfg_.grid_ns)
            for (double g : cfg_.grid_gammas) out.push_back(CellId{g, n});
        return out;
    }

    EpisodeConfig cell_episode(const CellId& cell) const {
        EpisodeConfig e = cfg_.episode;
        e.n = cell.n;
        e.gamma = cell.gamma;
        e.seed = cell_seed(cfg_.master_seed, cell);
        return e;
    }

    RewardConfig cell_reward(const CellId& cell) const {
        RewardConfig r = cfg_.reward;
        r.n = cell.n;
        return r;
    }

    fs::path cell_dir(const CellId& cell) const { return run_dir_ / ("cell_" + cell.name()); }

    void train_cell(const CellId& cell) {
        EpisodeConfig episode = cell_episode(cell);
        RewardConfig reward_cfg = cell_reward(cell);
        TrainConfig train_cfg = cfg_.train;
        train_cfg.seed = mix_seed(episode.seed, static_cast<std::uint64_t>(0x7124));

        Decoder decoder(cfg_.decoder);
        TrainResult result = train(decoder, reward_cfg, episode, train_cfg);

        fs::path dir = cell_dir(cell);
        fs::create_directories(dir);
        {
            std::ofstream out(dir / "checkpoint.txt");
            save_designer(out, result.designer);
        }
        {
            std::ofstream out(dir / "learning_curve.csv");
            out << "episode,mean_reward\n";
            for (std::size_t i = 0; i < result.learning_curve.size(); ++i)
                out << i << ',' << format_csv_value(result.learning_curve[i]) << '\n';
        }
    }

    Designer load_cell_designer(const CellId& cell) const {
        std::ifstream in(cell_dir(cell) / "checkpoint.txt");
        if (!in)
            throw std::runtime_error("missing checkpoint for cell " + cell.name() +
                                     " (run the train stage first)");
        return load_designer(in);
    }

    void generate_cell(const CellId& cell) {
        EpisodeConfig episode = cell_episode(cell);
        RewardConfig reward_cfg = cell_reward(cell);
        Designer designer = load_cell_designer(cell);
        Decoder decoder(cfg_.decoder);

        fs::path levels_dir = cell_dir(cell) / "levels";
        fs::path traj_dir = cell_dir(cell) / "trajectories";
        fs::create_directories(levels_dir);
        fs::create_directories(traj_dir);

        for (int i = 0; i < cfg_.evaluation.num_levels; ++i) {
            EpisodeConfig e = episode;
            e.seed = mix_seed(episode.seed,
                              static_cast<std::uint64_t>(0xE7A1000ULL) +
                                  static_cast<std::uint64_t>(i));
            Rng rng(e.seed);
            Trajectory traj = rollout(designer, decoder, reward_cfg, e, e.eval_steps, rng);
            char name[32];
            std::snprintf(name, sizeof(name), "%03d", i);
            {
                std::ofstream out(traj_dir / (std::string("trajectory_") + name + ".txt"));
                save_trajectory(out, traj);
            }
            {
                std::ofstream out(levels_dir / (std::string("level_") + name + ".txt"));
                out << level_to_text(traj.segments);
            }
        }
    }

    std::vector<Trajectory> load_cell_trajectories(const CellId& cell) const {
        Decoder decoder(cfg_.decoder);
        std::vector<Trajectory> out;
        for (int i = 0; i < cfg_.evaluation.num_levels; ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "%03d", i);
            fs::path path = cell_dir(cell) / "trajectories" / (std::string("trajectory_") + name + ".txt");
            std::ifstream in(path);
            if (!in)
                throw std::runtime_error("missing trajectory " + path.string() +
                                         " (run the generate stage first)");
            out.push_back(load_trajectory(in, &decoder));
        }
        return out;
    }

    void analyze_cell(const CellId& cell) {
        EpisodeConfig episode = cell_episode(cell);
        RewardConfig reward_cfg = cell_reward(cell);
        Designer designer = load_cell_designer(cell);
        Decoder decoder(cfg_.decoder);
        std::vector<Trajectory> corpus = load_cell_trajectories(cell);
        fs::path dir = cell_dir(cell);

        // State collection and epsilon-coverage SSC report.
        std::vector<std::pair<int, DesignerState>> all_states;
        for (const auto& traj : corpus)
            for (auto& [step, state] : extract_states(traj, episode))
                all_states.emplace_back(step, std::move(state));
        CategorizedStates cats = categorize_states(all_states, episode);
        double epsilon = cfg_.resolved_epsilon(cell.n);
        ClosureReport report;
        report.g = episode.n;
        report.h = episode.h;
        report.epsilon = epsilon;
        report.coverage = coverage_statistic(cats.precedent, cats.successor, epsilon);
        report.occurred = report.coverage >= 1.0 - cfg_.evaluation.delta;
        {
            std::ofstream out(dir / "closure_report.txt");
            write_closure_report(out, report);
        }
        {
            std::ofstream out(dir / "state_counts.csv");
            out << "step,samples\n";
            std::map<int, int> counts;
            for (const auto& [step, state] : all_states) ++counts[step];
            for (const auto& [step, count] : counts) out << step << ',' << count << '\n';
        }

        // 2D scatter of categorized states under a fixed seeded linear
        // projection, shared across cells with the same window size so the
        // axes are comparable.
        {
            int dim = cell.n * episode.d;
            Rng proj_rng(mix_seed(mix_seed(cfg_.master_seed, static_cast<std::uint64_t>(0x960c)),
                                  static_cast<std::uint64_t>(cell.n)));
            std::vector<double> proj(static_cast<std::size_t>(2) * dim);
            for (double& v : proj) v = proj_rng.next_gaussian() / std::sqrt(static_cast<double>(dim));
            auto project = [&](const DesignerState& s, double& x, double& y) {
                std::vector<double> flat = s.flat();
                x = y = 0.0;
                for (int i = 0; i < dim; ++i) {
                    x += proj[static_cast<std::size_t>(i)] * flat[static_cast<std::size_t>(i)];
                    y += proj[static_cast<std::size_t>(dim + i)] * flat[static_cast<std::size_t>(i)];
                }
            };
            std::ofstream out(dir / "scatter.csv");
            out << "x,y,category\n";
            auto dump = [&](const std::vector<DesignerState>& states, const char* label) {
                for (const auto& s : states) {
                    double x, y;
                    project(s, x, y);
                    out << format_csv_value(x) << ',' << format_csv_value(y) << ',' << label << '\n';
                }
            };
            dump(cats.initial, "initial");
            dump(cats.precedent, "precedent");
            dump(cats.successor, "successor");
        }

        // k-means references from all latent vectors of the evaluation corpus.
        std::vector<std::vector<double>> all_latents;
        for (const auto& traj : corpus)
            for (const auto& z : traj.latents()) all_latents.push_back(z);
        ReferenceSet refs = kmeans(all_latents, cfg_.evaluation.k, 100,
                                   mix_seed(episode.seed, static_cast<std::uint64_t>(0xc1a)));

        // Per-step MND and per-step reward over fresh regenerations, averaged
        // over mnd_repeats. Step 0 pools the initial latents; step i >= 1 is
        // the latents generated at that step across levels. Repeats are
        // independent and run in parallel; seeds are fixed per repeat so the
        // reduction is deterministic.
        int steps = episode.eval_steps;
        int repeats = cfg_.evaluation.mnd_repeats;
        std::vector<std::vector<double>> mnd_by_repeat(
            static_cast<std::size_t>(repeats), std::vector<double>(static_cast<std::size_t>(steps) + 1));
        std::vector<std::vector<double>> reward_by_repeat(
            static_cast<std::size_t>(repeats), std::vector<double>(static_cast<std::size_t>(steps)));
        auto run_repeat = [&](int rep) {
            std::vector<std::vector<std::vector<double>>> latents_by_step(
                static_cast<std::size_t>(steps) + 1);
            std::vector<double> reward_sum(static_cast<std::size_t>(steps), 0.0);
            for (int lvl = 0; lvl < cfg_.evaluation.num_levels; ++lvl) {
                EpisodeConfig e = episode;
                e.seed = mix_seed(episode.seed,
                                  static_cast<std::uint64_t>(0xAD000000ULL +
                                                             static_cast<unsigned long long>(rep) *
                                                                 1000003ULL +
                                                             static_cast<unsigned long long>(lvl)));
                Rng rng(e.seed);
                Trajectory traj = rollout(designer, decoder, reward_cfg, e, steps, rng);
                for (const auto& z : traj.initial_latents) latents_by_step[0].push_back(z);
                for (int s = 0; s < steps; ++s) {
                    latents_by_step[static_cast<std::size_t>(s) + 1].push_back(
                        traj.actions[static_cast<std::size_t>(s)]);
                    reward_sum[static_cast<std::size_t>(s)] +=
                        traj.rewards[static_cast<std::size_t>(s)];
                }
            }
            for (int s = 0; s <= steps; ++s)
                mnd_by_repeat[static_cast<std::size_t>(rep)][static_cast<std::size_t>(s)] =
                    mnd(latents_by_step[static_cast<std::size_t>(s)], refs);
            for (int s = 0; s < steps; ++s)
                reward_by_repeat[static_cast<std::size_t>(rep)][static_cast<std::size_t>(s)] =
                    reward_sum[static_cast<std::size_t>(s)] / cfg_.evaluation.num_levels;
        };
        {
            unsigned workers = std::max(1u, std::thread::hardware_concurrency());
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (int rep = static_cast<int>(w); rep < repeats;
                         rep += static_cast<int>(workers))
                        run_repeat(rep);
                });
            for (auto& t : pool) t.join();
        }
        auto write_curve = [&](const fs::path& path,
                               const std::vector<std::vector<double>>& by_repeat, int first_step) {
            std::ofstream out(path);
            out << "step,mean,std\n";
            std::size_t cols = by_repeat.front().size();
            for (std::size_t s = 0; s < cols; ++s) {
                double mean = 0.0;
                for (const auto& row : by_repeat) mean += row[s];
                mean /= static_cast<double>(by_repeat.size());
                double var = 0.0;
                for (const auto& row : by_repeat) var += (row[s] - mean) * (row[s] - mean);
                double sd = by_repeat.size() > 1
                                ? std::sqrt(var / static_cast<double>(by_repeat.size() - 1))
                                : 0.0;
                out << (first_step + static_cast<int>(s)) << ',' << format_csv_value(mean) << ','
                    << format_csv_value(sd) << '\n';
            }
        };
        write_curve(dir / "mnd_per_step.csv", mnd_by_repeat, 0);
        write_curve(dir / "reward_per_step.csv", reward_by_repeat, 1);

        // Div against a freshly sampled random-designer baseline corpus.
        {
            Designer baseline = Designer::random_sampler(episode.d);
            std::vector<Level> baseline_levels;
            for (int i = 0; i < cfg_.evaluation.num_levels; ++i) {
                EpisodeConfig e = episode;
                e.seed = mix_seed(episode.seed,
                                  static_cast<std::uint64_t>(0xBA5E000ULL) +
                                      static_cast<std::uint64_t>(i));
                Rng rng(e.seed);
                baseline_levels.push_back(
                    rollout(baseline, decoder, reward_cfg, e, steps, rng).segments);
            }
            std::vector<Level> eval_levels;
            for (const auto& traj : corpus) eval_levels.push_back(traj.segments);
            DivReport div = div_score(eval_levels, baseline_levels, cell.n,
                                      cfg_.evaluation.pair_count,
                                      mix_seed(episode.seed, static_cast<std::uint64_t>(0xd17)));
            std::ofstream out(dir / "div_report.csv");
            out << "d_M,mean_pairwise,div,pair_count\n";
            out << format_csv_value(div.d_m) << ',' << format_csv_value(div.mean_pairwise) << ','
                << format_csv_value(div.div) << ',' << div.pair_count << '\n';
        }

        // Interval reward table in the Table-I layout. With h = 25 and
        // eval_steps = 50 the intervals are [1,10], [11,25], [26,50].
        {
            std::vector<std::pair<int, int>> intervals = cell_intervals(episode);
            std::vector<double> means = interval_reward_stats(corpus, intervals);
            std::ofstream out(dir / "interval_rewards.csv");
            out << "interval_lo,interval_hi,mean_reward\n";
            for (std::size_t i = 0; i < intervals.size(); ++i)
                out << intervals[i].first << ',' << intervals[i].second << ','
                    << format_csv_value(means[i]) << '\n';
        }
    }

    static std::vector<std::pair<int, int>> cell_intervals(const EpisodeConfig& episode) {
        int early = std::min(10, episode.h - 1);
        return {{1, early}, {early + 1, episode.h}, {episode.h + 1, episode.eval_steps}};
    }

    // Summary table plus plot images, all recomputed from the persisted
    // per-cell CSVs.
    void report() {
        std::vector<CellId> all = cells();
        std::ofstream summary(run_dir_ / "summary.csv");
        summary << "metric";
        for (const auto& cell : all) summary << ',' << cell.name();
        summary << '\n';

        std::vector<std::vector<std::string>> metric_rows;
        std::vector<std::string> labels;
        bool first = true;
        std::vector<std::string> div_row, coverage_row;
        for (const auto& cell : all) {
            CsvTable intervals = read_csv(cell_dir(cell) / "interval_rewards.csv");
            if (first) {
                for (const auto& row : intervals.rows) {
                    labels.push_back("R_" + row[0] + ":" + row[1]);
                    metric_rows.emplace_back();
                }
                first = false;
            }
            for (std::size_t i = 0; i < intervals.rows.size(); ++i)
                metric_rows[i].push_back(intervals.rows[i][2]);

            CsvTable div = read_csv(cell_dir(cell) / "div_report.csv");
            div_row.push_back(div.rows.front()[div.column("div")]);

            std::ifstream closure(cell_dir(cell) / "closure_report.txt");
            std::string line, coverage = "nan";
            while (std::getline(closure, line))
                if (line.rfind("coverage: ", 0) == 0) coverage = line.substr(10);
            coverage_row.push_back(coverage);
        }
        for (std::size_t i = 0; i < labels.size(); ++i) {
            summary << labels[i];
            for (const auto& v : metric_rows[i]) summary << ',' << v;
            summary << '\n';
        }
        summary << "Div";
        for (const auto& v : div_row) summary << ',' << v;
        summary << '\n';
        summary << "coverage";
        for (const auto& v : coverage_row) summary << ',' << v;
        summary << '\n';

        for (const auto& cell : all) plot_cell(cell);
    }

    void plot_cell(const CellId& cell) {
        fs::path dir = cell_dir(cell);
        auto curve = [&](const std::string& stem, const std::string& title) {
            CsvTable table = read_csv(dir / (stem + ".csv"));
            std::ofstream out(dir / (stem + ".svg"));
            plot_curve_svg(out, table.numeric_column("step"), table.numeric_column("mean"),
                           table.numeric_column("std"), cfg_.episode.h, title + " " + cell.name());
        };
        curve("mnd_per_step", "MND per step,");
        curve("reward_per_step", "reward per step,");
        CsvTable scatter = read_csv(dir / "scatter.csv");
        std::ofstream out(dir / "scatter.svg");
        plot_scatter_svg(out, scatter.numeric_column("x"), scatter.numeric_column("y"),
                         scatter.text_column("category"), "states " + cell.name());
    }

private:
    ExperimentConfig cfg_;
    fs::path run_dir_;
};

// Next unused versioned run directory under the configured output root.
inline fs::path next_run_dir(const fs::path& root) {
    fs::create_directories(root);
    for (int i = 1; i < 10000; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "run_%04d", i);
        fs::path candidate = root / name;
        if (!fs::exists(candidate)) return candidate;
    }
    throw std::runtime_error("next_run_dir: too many runs under " + root.string());
}

struct GridOutcome {
    fs::path run_dir;
    bool ok = true;
};

// Full pipeline for every grid cell (optionally filtered to one cell).
// A failing stage aborts its cell and is recorded in status.csv; the other
// cells continue.
inline GridOutcome run_grid(const ExperimentConfig& cfg, const fs::path& run_dir,
                            const std::optional<CellId>& only_cell = std::nullopt) {
    Harness harness(cfg, run_dir);
    std::ofstream status(run_dir / "status.csv");
    status << "cell,stage,status,message\n";
    GridOutcome outcome;
    outcome.run_dir = run_dir;
    for (const auto& cell : harness.cells()) {
        if (only_cell && (only_cell->n != cell.n || only_cell->gamma != cell.gamma)) continue;
        std::string stage = "train";
        try {
            harness.train_cell(cell);
            status << cell.name() << ",train,ok,\n";
            stage = "generate";
            harness.generate_cell(cell);
            status << cell.name() << ",generate,ok,\n";
            stage = "analyze";
            harness.analyze_cell(cell);
            status << cell.name() << ",analyze,ok,\n";
        } catch (const std::exception& e) {
            status << cell.name() << ',' << stage << ",error," << e.what() << '\n';
            outcome.ok = false;
        }
    }
    try {
        if (only_cell) {
            harness.plot_cell(*only_cell); // cross-cell summary needs every cell
        } else {
            harness.report();
        }
        status << "_all,report,ok,\n";
    } catch (const std::exception& e) {
        status << "_all,report,error," << e.what() << '\n';
        outcome.ok = false;
    }
    return outcome;
}

} // namespace olg
