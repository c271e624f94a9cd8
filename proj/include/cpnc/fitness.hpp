#pragma once

#include "cpnc/controller.hpp"
#include "cpnc/genome.hpp"
#include "cpnc/maze.hpp"
#include "cpnc/robot.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>

namespace cpnc {

/// Objective pair, both maximized. f1 in [0,1] (fast, straight, safe motion),
/// f2 in [0,H] (target reaching).
struct FitnessVector {
    double f1 = 0.0;
    double f2 = 0.0;

    friend bool operator==(const FitnessVector&, const FitnessVector&) = default;
};

struct FitnessConfig {
    int max_step = 200;
    double hit_score = 50.0; // H

    friend bool operator==(const FitnessConfig&, const FitnessConfig&) = default;
};

void validate_fitness_config(const FitnessConfig& cfg);

/// V * (1 - sqrt(dv)) * (1 - I) with V = |wl+wr|, dv = |wl-wr|.
double f1_step(double wl, double wr, double max_ir_activation);

/// H on a step that consumed a target, 1/(1+d) otherwise.
double f2_step(bool hit, double nearest_distance, const FitnessConfig& cfg);

struct EpisodeResult {
    FitnessVector fitness;
    int steps = 0;
    Termination termination = Termination::StepLimit;
    std::optional<int> first_hit_step; // 1-based step that first consumed a target
    int targets_hit = 0;
    EpisodeState trace;
};

/// JSON summary `{f1, f2, steps, termination, first_hit_step}` (first_hit_step is null when no hit).
std::string episode_summary_json(const EpisodeResult& r);

/// Maps the current reading (and 0-based step index) to wheel commands.
using Policy = std::function<WheelCommand(const SensorVector&, int)>;

/// Runs one interaction sequence of at most cfg.max_step steps and accumulates F1/F2.
/// Sums run over executed steps only and are divided by cfg.max_step.
EpisodeResult run_policy_episode(const MazeSpec& maze, const Pose& start, const Policy& policy,
                                 const FitnessConfig& cfg, const RobotParams& params);

enum class EpisodeMode { Learn, Frozen };

struct SimulationConfig {
    RobotParams robot;
    FitnessConfig fitness;
    LearningSchedule schedule;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Learn mode (CPNC only): each step updates the Kohonen winner on the current reading
/// with learning_rate(step) before acting. Frozen mode never touches the genome.
/// Returns the episode and the (possibly updated) genome.
std::pair<EpisodeResult, Genome> run_episode(ControllerKind kind, const Genome& genome, const MazeSpec& maze,
                                             const Pose& start, EpisodeMode mode, const SimulationConfig& sim);

struct Evaluation {
    FitnessVector fitness;
    Genome genome;        // genome after lifetime learning
    bool reached = false; // some frozen episode consumed a target
};

/// Per start: a learning episode carrying the genome forward, then a frozen episode
/// scored with the updated genome. Fitness is the mean of the frozen episodes.
/// FFNC genomes pass through unchanged (learning is a no-op for them).
Evaluation evaluate(ControllerKind kind, const Genome& genome, const MazeSpec& maze, std::span<const Pose> starts,
                    const SimulationConfig& sim);

} // namespace cpnc
