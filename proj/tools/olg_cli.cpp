// Command-line front end for the online level generation lab.
//
//   olg all      --config cfg.json [--out dir] [--seed N] [--cell gamma=0.7,n=4]
//   olg train    --config cfg.json --out <run dir> [...]
//   olg generate --config cfg.json --out <run dir> [...]
//   olg analyze  --config cfg.json --out <run dir> [...]
//   olg report   --config cfg.json --out <run dir>
//
// `all` creates a fresh versioned run directory (run_0001, run_0002, ...)
// under the output root and executes the whole pipeline. The stage
// subcommands operate in place on an existing run directory.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "olg/config.hpp"
#include "olg/harness.hpp"

namespace {

std::optional<olg::CellId> parse_cell(const std::string& spec) {
    if (spec.empty()) return std::nullopt;
    olg::CellId cell;
    if (std::sscanf(spec.c_str(), "gamma=%lf,n=%d", &cell.gamma, &cell.n) != 2)
        throw CLI::ValidationError("--cell must look like gamma=0.7,n=4");
    return cell;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online level generation lab: train designers, generate levels, "
                 "detect state space closure, measure diversity"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string cell_spec;
    std::uint64_t seed_override = 0;
    bool has_seed = false;

    auto add_common = [&](CLI::App* cmd, bool out_required) {
        cmd->add_option("--config", config_path, "experiment config file (JSON)")->required();
        auto* out = cmd->add_option("--out", out_dir, "output directory");
        if (out_required) out->required();
        cmd->add_option("--seed", seed_override, "override the master seed")
            ->each([&](const std::string&) { has_seed = true; });
        cmd->add_option("--cell", cell_spec, "restrict to one grid cell, e.g. gamma=0.7,n=4");
    };

    auto* cmd_all = app.add_subcommand("all", "train, generate, analyze and report");
    add_common(cmd_all, false);
    auto* cmd_train = app.add_subcommand("train", "train designers into a run directory");
    add_common(cmd_train, true);
    auto* cmd_generate = app.add_subcommand("generate", "generate evaluation levels");
    add_common(cmd_generate, true);
    auto* cmd_analyze = app.add_subcommand("analyze", "SSC detection and metrics");
    add_common(cmd_analyze, true);
    auto* cmd_report = app.add_subcommand("report", "summary table and plots");
    add_common(cmd_report, true);

    CLI11_PARSE(app, argc, argv);

    try {
        olg::ExperimentConfig cfg = olg::load_experiment_config(config_path);
        if (has_seed) {
            cfg.master_seed = seed_override;
            cfg.episode.seed = seed_override;
        }
        if (!out_dir.empty() && app.got_subcommand(cmd_all)) cfg.output_dir = out_dir;
        std::optional<olg::CellId> only_cell = parse_cell(cell_spec);

        if (app.got_subcommand(cmd_all)) {
            olg::GridOutcome outcome = olg::run_grid(cfg, olg::next_run_dir(cfg.output_dir), only_cell);
            std::cout << "run directory: " << outcome.run_dir.string() << '\n';
            if (!outcome.ok) {
                std::cerr << "some cells failed; see " << (outcome.run_dir / "status.csv").string()
                          << '\n';
                return 2;
            }
            return 0;
        }

        olg::Harness harness(cfg, out_dir);
        for (const auto& cell : harness.cells()) {
            if (only_cell && (only_cell->n != cell.n || only_cell->gamma != cell.gamma)) continue;
            if (app.got_subcommand(cmd_train)) harness.train_cell(cell);
            else if (app.got_subcommand(cmd_generate)) harness.generate_cell(cell);
            else if (app.got_subcommand(cmd_analyze)) harness.analyze_cell(cell);
        }
        if (app.got_subcommand(cmd_report)) harness.report();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
