#pragma once

#include "cpnc/config.hpp"
#include "cpnc/evolution.hpp"
#include "cpnc/metrics.hpp"
#include "cpnc/robot.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpnc {

// ---- per-generation tables -------------------------------------------------

struct GenerationRow {
    int gen = 0;
    double best_f1 = 0.0;
    double median_f1 = 0.0;
    double best_f2 = 0.0;
    double median_f2 = 0.0;
    double s_measure = 0.0;
    double reached_fraction = 0.0;

    friend bool operator==(const GenerationRow&, const GenerationRow&) = default;
};

GenerationRow to_row(const GenerationStats& st);

/// `gen,best_f1,median_f1,best_f2,median_f2,s_measure,reached_fraction`, shortest round-trip numbers.
std::string generations_csv(std::span<const GenerationRow> rows);
/// Throws ParseError on a malformed table.
std::vector<GenerationRow> parse_generations_csv(const std::string& text);

/// Value of a named column: best_f1, median_f1, best_f2, median_f2, s_measure, reached_fraction.
/// Throws std::invalid_argument for an unknown name.
double series_value(const GenerationRow& row, const std::string& series);

/// Every tenth generation up to `last`, plus `last` itself when it is not a multiple of ten.
std::vector<int> sampled_generations(int last);

struct BoxRow {
    std::string series;
    int gen = 0;
    BoxStats box;
};

/// Boxplot over runs of one series at each sampled generation. All runs must share the
/// same generation numbering; throws std::invalid_argument otherwise.
std::vector<BoxRow> aggregate_series(std::span<const std::vector<GenerationRow>> runs, const std::string& series);

/// `series,gen,min,whisker_lo,q1,median,mean,q3,whisker_hi,max,outliers...`
std::string boxplot_csv(std::span<const BoxRow> rows);

// ---- serialized controllers ------------------------------------------------

struct StoredController {
    std::size_t index = 0; // position in the run's final population
    Genome genome;
    FitnessVector fitness;
    int rank = 0;
    bool reached = false;
    bool front = false; // member of the final nondominated set under the run's mode
};

struct StoredPopulation {
    ControllerKind kind = ControllerKind::CPNC;
    Mode mode = Mode::MOOP;
    std::vector<StoredController> members;
};

std::string population_json(const StoredPopulation& pop);
StoredPopulation parse_population_json(const std::string& text);

struct FrontMember {
    int run = 0;
    std::size_t index = 0;
    FitnessVector fitness;
    Genome genome;
};

/// Nondominated union of every run's final front; duplicates keep the first occurrence
/// (lowest run, then lowest index). Sorted by f1 ascending, then f2.
std::vector<FrontMember> accumulate_members(std::span<const FrontMember> candidates);

// ---- rendering -------------------------------------------------------------

/// Deterministic SVG of the maze and, when non-empty, a path with start, hit and collision markers.
std::string render_svg(const MazeSpec& maze, std::span<const TraceRow> path);

// ---- file helpers ----------------------------------------------------------

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// ---- commands --------------------------------------------------------------

/// Runs cfg.runs evolutions (seed = master_seed + i) and writes run_XXX/ trees plus
/// aggregate/ boxplots and the accumulated front under cfg.out_dir.
void cmd_train(const ExperimentConfig& cfg, std::ostream& log);

struct ControllerResult {
    std::string id;
    int run = -1; // -1 for accumulated-front members
    std::size_t index = 0;
    std::vector<std::string> tags;
    FitnessVector training_fitness;
    EpisodeResult episode;
    bool reached = false;
};

struct TagSummary {
    std::string tag;
    int tested = 0;
    int reached = 0;
};

struct GeneralizationReport {
    ControllerKind kind = ControllerKind::CPNC;
    Mode mode = Mode::MOOP;
    int episode_steps = 0;
    std::vector<ControllerResult> controllers;
    std::vector<TagSummary> summary; // "all", "best_f1", "best_f2", "accumulated"

    const TagSummary& tag(const std::string& name) const;
};

struct GeneralizeOptions {
    std::optional<std::filesystem::path> test_maze; // defaults to the maze recorded at training time
    std::optional<std::filesystem::path> out;       // defaults to <train_dir>/generalize
    std::optional<int> episode_repeats;             // defaults to the training config's value
};

/// Tests every final-front member of every run (and the accumulated front) frozen in the
/// test maze for episode_repeats * max_step steps. Writes report.json, paths/ and render/.
GeneralizationReport cmd_generalize(const std::filesystem::path& train_dir, const GeneralizeOptions& opt,
                                    std::ostream& log);

struct AdaptReport {
    std::vector<int> gens;
    std::vector<double> pretrained_reached; // mean over runs, one entry per generation
    std::vector<double> random_reached;
    int phase1_gens = 0;
};

/// Evolves two arms on the test maze with a single group: one seeded with the accumulated
/// front of `pretrained_dir` (cloned round-robin or truncated to pop_size), one random.
/// Both arms use seed master_seed + i for run i. Writes under cfg.out_dir.
AdaptReport cmd_adapt(const ExperimentConfig& cfg, const std::filesystem::path& pretrained_dir, std::ostream& log);

struct Comparison {
    std::string a;
    std::string b;
    std::string series;
    int gen = 0;
    double median_a = 0.0;
    double median_b = 0.0;
    RankSumResult test;
};

/// Boxplots for every set and two-sided rank-sum tests between every pair of sets on the
/// final generation of each series. Requires at least two sets.
std::vector<Comparison> cmd_stats(std::span<const std::filesystem::path> sets, const std::filesystem::path& out,
                                  std::ostream& log);

} // namespace cpnc
