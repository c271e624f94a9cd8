#include "cpnc/config.hpp"
#include "cpnc/error.hpp"
#include "cpnc/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cpnc;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2 };

struct CommonFlags {
    std::string config;
    Overrides overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("-c,--config", f.config, "experiment configuration (TOML)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.overrides.seed, "master seed; run i uses seed + i");
    cmd->add_option("--runs", f.overrides.runs, "number of independent runs");
    cmd->add_option("--out", f.overrides.out, "output directory");
    cmd->add_option("--threads", f.overrides.threads, "evaluation threads (results do not depend on it)");
}

ExperimentConfig resolve(const CommonFlags& f)
{
    ExperimentConfig cfg = load_config(f.config);
    apply_overrides(cfg, f.overrides);
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"CPNC/FFNC neuroevolution experiments"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    auto* train = app.add_subcommand("train", "evolve controllers in the training maze");
    add_common(train, train_flags);

    std::string gen_from;
    GeneralizeOptions gen_opt;
    auto* generalize = app.add_subcommand("generalize", "test trained front members frozen in the test maze");
    generalize->add_option("--from", gen_from, "output directory of a train batch")->required();
    generalize->add_option("--test-maze", gen_opt.test_maze, "override the recorded test maze");
    generalize->add_option("--repeats", gen_opt.episode_repeats, "episode length in units of max_step");
    generalize->add_option("--out", gen_opt.out, "report directory (default <from>/generalize)");

    CommonFlags adapt_flags;
    std::string adapt_from;
    auto* adapt = app.add_subcommand("adapt", "continue evolution in the test maze: pretrained vs random start");
    add_common(adapt, adapt_flags);
    adapt->add_option("--from", adapt_from, "train batch whose accumulated front seeds the pretrained arm")
        ->required();

    std::string render_maze;
    std::string render_trace;
    std::string render_out;
    auto* render = app.add_subcommand("render", "draw a maze and optionally a path trace as SVG");
    render->add_option("--maze", render_maze, "maze file")->required()->check(CLI::ExistingFile);
    render->add_option("--trace", render_trace, "path trace CSV")->check(CLI::ExistingFile);
    render->add_option("--out", render_out, "SVG file to write")->required();

    std::vector<std::string> stats_sets;
    std::string stats_out;
    auto* stats = app.add_subcommand("stats", "boxplots and rank-sum tests across run sets");
    stats->add_option("sets", stats_sets, "train output directories")->required()->expected(2, -1);
    stats->add_option("--out", stats_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    try {
        if (*train) {
            cmd_train(resolve(train_flags), std::cerr);
        } else if (*generalize) {
            cmd_generalize(gen_from, gen_opt, std::cerr);
        } else if (*adapt) {
            cmd_adapt(resolve(adapt_flags), adapt_from, std::cerr);
        } else if (*render) {
            const MazeSpec maze = load_maze(render_maze);
            std::vector<TraceRow> rows;
            if (!render_trace.empty()) {
                std::istringstream in(read_file(render_trace));
                rows = read_path_csv(in);
            }
            write_file(render_out, render_svg(maze, rows));
        } else if (*stats) {
            std::vector<fs::path> sets(stats_sets.begin(), stats_sets.end());
            cmd_stats(sets, stats_out, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
