#pragma once

#include "cpnc/fitness.hpp"
#include "cpnc/genome.hpp"
#include "cpnc/maze.hpp"
#include "cpnc/nsga2.hpp"
#include "cpnc/operators.hpp"
#include "cpnc/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cpnc {

struct EvoConfig {
    Mode mode = Mode::MOOP;
    ControllerKind kind = ControllerKind::CPNC;
    int pop_size = 56;
    int groups = 4;
    int group_size = 14;
    int phase1_gens = 50;
    int phase2_gens = 250;
    VariationConfig variation;
    std::uint64_t seed = 1;
    // Learned Kohonen weights are written back into the genome.
    bool lamarckian = true;
    // Phase-2 fitness averages over every maze start; otherwise only the first start is used.
    bool phase2_all_starts = true;
    // Evaluation worker threads; results never depend on it.
    int threads = 1;
};

/// Throws ConfigError on inconsistent sizes or probabilities.
void validate_evo_config(const EvoConfig& cfg);

struct GenerationStats {
    int gen = 0; // cumulative over both phases, 1-based
    double best_f1 = 0.0;
    double median_f1 = 0.0;
    double best_f2 = 0.0;
    double median_f2 = 0.0;
    double s_measure = 0.0;       // of the population's raw-objective nondominated set
    double reached_fraction = 0.0; // share of individuals whose scored episodes consumed a target
    std::vector<FitnessVector> fitness;
};

GenerationStats summarize(int gen, std::span<const Individual> pop);

struct RunResult {
    EvoConfig config;
    std::vector<GenerationStats> generations;
    std::vector<Individual> final_population;
    std::vector<std::size_t> final_front; // rank-0 members under the active mode
};

/// Evaluates every individual over `starts` (in parallel when cfg.threads > 1) and fills
/// fitness, masked fitness and the reached flag; with cfg.lamarckian the learned genome is kept.
void evaluate_population(std::span<Individual> pop, const EvoConfig& cfg, const SimulationConfig& sim,
                         const MazeSpec& maze, std::span<const Pose> starts);

struct Phase1Result {
    std::vector<std::vector<Individual>> groups;
    std::vector<GenerationStats> generations;
};

/// Random (or supplied) initial population split into cfg.groups groups; group g evolves
/// alone from maze.starts[g] for cfg.phase1_gens generations with frozen Kohonen layers.
/// With phase1_gens == 0 the partitioned initial population is returned unevaluated.
Phase1Result run_phase1(const EvoConfig& cfg, const SimulationConfig& sim, const MazeSpec& maze, Rng& rng,
                        std::span<const Genome> initial = {});

struct Phase2Result {
    std::vector<Individual> population;
    std::vector<GenerationStats> generations; // numbered from phase1_gens + 1
};

/// Merges the groups and evolves the whole population with neuron-matched crossover.
Phase2Result run_phase2(std::vector<std::vector<Individual>> groups, const EvoConfig& cfg,
                        const SimulationConfig& sim, const MazeSpec& maze, Rng& rng);

/// Both phases from cfg.seed. `initial`, when given, replaces the random initial population
/// (it must hold exactly cfg.pop_size genomes).
RunResult run_evolution(const EvoConfig& cfg, const SimulationConfig& sim, const MazeSpec& maze,
                        std::span<const Genome> initial = {});

} // namespace cpnc
