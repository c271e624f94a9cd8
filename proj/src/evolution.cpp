#include "cpnc/evolution.hpp"

#include "cpnc/error.hpp"
#include "cpnc/metrics.hpp"

#include <algorithm>
#include <thread>

namespace cpnc {

void validate_evo_config(const EvoConfig& cfg)
{
    if (cfg.pop_size <= 0 || cfg.groups <= 0 || cfg.group_size <= 0) {
        throw ConfigError("evolution: population, group count and group size must be positive");
    }
    if (cfg.groups * cfg.group_size != cfg.pop_size) {
        throw ConfigError("evolution: groups * group_size must equal pop_size");
    }
    if (cfg.group_size < 2) {
        throw ConfigError("evolution: groups need at least two individuals");
    }
    if (cfg.phase1_gens < 0 || cfg.phase2_gens < 0) {
        throw ConfigError("evolution: generation budgets must be non-negative");
    }
    const auto& v = cfg.variation;
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(v.p_cross_phase1) || !prob(v.p_cross_phase2) || !prob(v.p_mut)) {
        throw ConfigError("evolution: probabilities must lie in [0,1]");
    }
    if (!(v.eta_c >= 0.0) || !(v.eta_m >= 0.0)) {
        throw ConfigError("evolution: distribution indices must be non-negative");
    }
}

GenerationStats summarize(int gen, std::span<const Individual> pop)
{
    GenerationStats st;
    st.gen = gen;
    if (pop.empty()) {
        return st;
    }
    std::vector<double> f1;
    std::vector<double> f2;
    std::size_t reached = 0;
    for (const auto& ind : pop) {
        st.fitness.push_back(ind.fitness);
        f1.push_back(ind.fitness.f1);
        f2.push_back(ind.fitness.f2);
        reached += ind.reached ? 1 : 0;
    }
    std::sort(f1.begin(), f1.end());
    std::sort(f2.begin(), f2.end());
    st.best_f1 = f1.back();
    st.best_f2 = f2.back();
    st.median_f1 = quantile_sorted(f1, 0.5);
    st.median_f2 = quantile_sorted(f2, 0.5);
    st.s_measure = s_measure(st.fitness);
    st.reached_fraction = static_cast<double>(reached) / static_cast<double>(pop.size());
    return st;
}

void evaluate_population(std::span<Individual> pop, const EvoConfig& cfg, const SimulationConfig& sim,
                         const MazeSpec& maze, std::span<const Pose> starts)
{
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Individual& ind = pop[i];
            Evaluation ev = evaluate(cfg.kind, ind.genome, maze, starts, sim);
            ind.fitness = ev.fitness;
            ind.masked = soop_mask(ev.fitness, cfg.mode);
            ind.reached = ev.reached;
            if (cfg.lamarckian) {
                ind.genome = ev.genome;
            }
        }
    };
    const std::size_t n = pop.size();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.threads, 1)), n);
    if (workers <= 1) {
        work(0, n);
        return;
    }
    // Each worker owns a contiguous index range, so results do not depend on scheduling.
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(work, n * w / workers, n * (w + 1) / workers);
    }
}

namespace {

using Crossover = std::pair<Genome, Genome> (*)(const Genome&, const Genome&, ControllerKind, const VariationConfig&,
                                                Rng&);

// One NSGA-II generation: offspring by tournament + variation, then (mu+lambda) truncation.
void evolve_generation(std::vector<Individual>& pop, Crossover crossover, const EvoConfig& cfg,
                       const SimulationConfig& sim, const MazeSpec& maze, std::span<const Pose> starts, Rng& rng)
{
    const std::size_t n = pop.size();
    std::vector<Individual> offspring;
    offspring.reserve(n + 1);
    while (offspring.size() < n) {
        const std::size_t a = tournament_select(pop, rng);
        const std::size_t b = tournament_select(pop, rng);
        auto [c1, c2] = crossover(pop[a].genome, pop[b].genome, cfg.kind, cfg.variation, rng);
        offspring.emplace_back().genome = std::move(c1);
        if (offspring.size() < n) {
            offspring.emplace_back().genome = std::move(c2);
        }
    }
    evaluate_population(offspring, cfg, sim, maze, starts);
    pop.insert(pop.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    pop = select_survivors(std::move(pop), n);
}

std::vector<Individual> pooled(const std::vector<std::vector<Individual>>& groups)
{
    std::vector<Individual> all;
    for (const auto& g : groups) {
        all.insert(all.end(), g.begin(), g.end());
    }
    return all;
}

} // namespace

Phase1Result run_phase1(const EvoConfig& cfg, const SimulationConfig& sim, const MazeSpec& maze, Rng& rng,
                        std::span<const Genome> initial)
{
    validate_evo_config(cfg);
    if (maze.starts.size() < static_cast<std::size_t>(cfg.groups)) {
        throw ConfigError("evolution: maze '" + maze.name + "' has fewer start poses than groups");
    }
    if (!initial.empty() && initial.size() != static_cast<std::size_t>(cfg.pop_size)) {
        throw ConfigError("evolution: initial population must hold exactly pop_size genomes");
    }

    Phase1Result out;
    out.groups.resize(static_cast<std::size_t>(cfg.groups));
    for (int i = 0; i < cfg.pop_size; ++i) {
        Individual ind;
        ind.genome = initial.empty() ? random_genome(rng) : initial[static_cast<std::size_t>(i)];
        out.groups[static_cast<std::size_t>(i / cfg.group_size)].push_back(std::move(ind));
    }
    if (cfg.phase1_gens == 0) {
        return out;
    }

    std::vector<Rng> group_rng;
    for (int g = 0; g < cfg.groups; ++g) {
        group_rng.emplace_back(rng.next());
    }
    for (std::size_t g = 0; g < out.groups.size(); ++g) {
        evaluate_population(out.groups[g], cfg, sim, maze, std::span<const Pose>(&maze.starts[g], 1));
        assign_rank_and_crowding(out.groups[g]);
    }
    for (int gen = 1; gen <= cfg.phase1_gens; ++gen) {
        for (std::size_t g = 0; g < out.groups.size(); ++g) {
            evolve_generation(out.groups[g], &crossover_phase1, cfg, sim, maze,
                              std::span<const Pose>(&maze.starts[g], 1), group_rng[g]);
        }
        const auto all = pooled(out.groups);
        out.generations.push_back(summarize(gen, all));
    }
    return out;
}

Phase2Result run_phase2(std::vector<std::vector<Individual>> groups, const EvoConfig& cfg,
                        const SimulationConfig& sim, const MazeSpec& maze, Rng& rng)
{
    validate_evo_config(cfg);
    Phase2Result out;
    out.population = pooled(groups);
    const std::span<const Pose> starts =
        cfg.phase2_all_starts ? std::span<const Pose>(maze.starts) : std::span<const Pose>(maze.starts.data(), 1);

    evaluate_population(out.population, cfg, sim, maze, starts);
    assign_rank_and_crowding(out.population);
    for (int gen = 1; gen <= cfg.phase2_gens; ++gen) {
        evolve_generation(out.population, &crossover_phase2, cfg, sim, maze, starts, rng);
        out.generations.push_back(summarize(cfg.phase1_gens + gen, out.population));
    }
    return out;
}

RunResult run_evolution(const EvoConfig& cfg, const SimulationConfig& sim, const MazeSpec& maze,
                        std::span<const Genome> initial)
{
    validate_evo_config(cfg);
    validate_params(sim.robot);
    validate_fitness_config(sim.fitness);
    validate_schedule(sim.schedule);

    Rng rng(cfg.seed);
    Phase1Result p1 = run_phase1(cfg, sim, maze, rng, initial);
    Phase2Result p2 = run_phase2(std::move(p1.groups), cfg, sim, maze, rng);

    RunResult result;
    result.config = cfg;
    result.generations = std::move(p1.generations);
    result.generations.insert(result.generations.end(), p2.generations.begin(), p2.generations.end());
    result.final_population = std::move(p2.population);

    std::vector<FitnessVector> masked;
    for (const auto& ind : result.final_population) {
        masked.push_back(ind.masked);
    }
    result.final_front = fast_nondominated_sort(masked).front();
    return result;
}

} // namespace cpnc
