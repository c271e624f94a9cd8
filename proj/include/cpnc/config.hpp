#pragma once

#include "cpnc/evolution.hpp"
#include "cpnc/fitness.hpp"
#include "cpnc/maze.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace cpnc {

/// Everything a batch needs. `text` keeps the TOML source so it can be echoed into manifests.
struct ExperimentConfig {
    EvoConfig evo;
    SimulationConfig sim;
    MazeSpec train_maze;
    MazeSpec test_maze;
    std::filesystem::path train_maze_path;
    std::filesystem::path test_maze_path;
    int runs = 30;
    std::uint64_t master_seed = 1;
    std::filesystem::path out_dir = "results";
    int episode_repeats = 3; // generalization horizon in units of fitness.max_step
    std::string text;
};

/// Parses TOML text. Relative maze paths resolve against `base_dir`. Unknown keys, wrong
/// types and invalid values throw ConfigError; unreadable or invalid mazes too.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Command-line overrides applied on top of a loaded file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<std::filesystem::path> out;
    std::optional<int> threads;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Range and consistency checks over every section. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

} // namespace cpnc
