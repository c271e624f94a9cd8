#include "support.hpp"

#include "cpnc/error.hpp"
#include "cpnc/evolution.hpp"
#include "cpnc/nsga2.hpp"
#include "cpnc/operators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace cpnc;

namespace {

// Repeatedly peel off the nondominated remainder.
Fronts brute_fronts(std::span<const FitnessVector> pts)
{
    auto dom = [](const FitnessVector& a, const FitnessVector& b) {
        return a.f1 >= b.f1 && a.f2 >= b.f2 && (a.f1 > b.f1 || a.f2 > b.f2);
    };
    std::vector<bool> done(pts.size(), false);
    std::size_t left = pts.size();
    Fronts fronts;
    while (left > 0) {
        std::vector<std::size_t> front;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (done[i]) {
                continue;
            }
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
                dominated = !done[j] && dom(pts[j], pts[i]);
            }
            if (!dominated) {
                front.push_back(i);
            }
        }
        for (std::size_t i : front) {
            done[i] = true;
        }
        left -= front.size();
        fronts.push_back(std::move(front));
    }
    return fronts;
}

std::vector<FitnessVector> random_points(Rng& rng, std::size_t n)
{
    std::vector<FitnessVector> pts(n);
    for (auto& p : pts) {
        // coarse grid so that ties and duplicates actually occur
        p = {std::round(rng.uniform() * 8) / 8, std::round(rng.uniform(0, 3) * 8) / 8};
    }
    return pts;
}

bool is_permutation(const NeuronMatch& m)
{
    std::set<std::size_t> seen(m.begin(), m.end());
    return seen.size() == kNeurons && *seen.rbegin() == kNeurons - 1;
}

EvoConfig small_config(ControllerKind kind, Mode mode, int p1, int p2)
{
    EvoConfig cfg;
    cfg.kind = kind;
    cfg.mode = mode;
    cfg.pop_size = 16;
    cfg.groups = 4;
    cfg.group_size = 4;
    cfg.phase1_gens = p1;
    cfg.phase2_gens = p2;
    cfg.seed = 99;
    return cfg;
}

SimulationConfig short_episodes()
{
    SimulationConfig sim;
    sim.fitness.max_step = 60;
    return sim;
}

} // namespace

TEST_SUITE("evolution")
{
    TEST_CASE("dominance examples")
    {
        CHECK(dominates({0.5, 2.0}, {0.4, 1.0}));
        CHECK_FALSE(dominates({0.5, 1.0}, {0.4, 2.0}));
        CHECK_FALSE(dominates({0.4, 2.0}, {0.5, 1.0}));
        CHECK_FALSE(dominates({0.5, 2.0}, {0.5, 2.0}));
    }

    TEST_CASE("soop masking")
    {
        CHECK(soop_mask({0.3, 1.2}, Mode::MOOP) == FitnessVector{0.3, 1.2});
        CHECK(soop_mask({0.3, 1.2}, Mode::SOOP_F1) == FitnessVector{0.3, 0.0});
        CHECK(soop_mask({0.3, 1.2}, Mode::SOOP_F2) == FitnessVector{0.0, 1.2});
        CHECK(parse_mode("soop-f2") == Mode::SOOP_F2);
        CHECK(to_string(Mode::SOOP_F1) == "SOOP_F1");
        CHECK_THROWS_AS(parse_mode("both"), std::invalid_argument);
    }

    TEST_CASE("SOOP_F2 fronts follow descending f2")
    {
        Rng rng(51);
        for (int trial = 0; trial < 100; ++trial) {
            const auto pts = random_points(rng, 1 + rng.index(40));
            std::vector<FitnessVector> masked;
            for (const auto& p : pts) {
                masked.push_back(soop_mask(p, Mode::SOOP_F2));
            }
            const Fronts fronts = fast_nondominated_sort(masked);
            std::vector<double> order;
            for (const auto& p : pts) {
                order.push_back(p.f2);
            }
            std::sort(order.begin(), order.end(), std::greater<>());
            order.erase(std::unique(order.begin(), order.end()), order.end());
            REQUIRE(fronts.size() == order.size());
            for (std::size_t k = 0; k < fronts.size(); ++k) {
                for (std::size_t i : fronts[k]) {
                    CHECK(pts[i].f2 == order[k]);
                }
            }
        }
    }

    TEST_CASE("nondominated sort examples")
    {
        const std::vector<FitnessVector> a = {{1, 2}, {2, 1}, {0.5, 0.5}};
        CHECK(fast_nondominated_sort(a) == Fronts{{0, 1}, {2}});
        const std::vector<FitnessVector> one = {{0.3, 0.3}};
        CHECK(fast_nondominated_sort(one) == Fronts{{0}});
        const std::vector<FitnessVector> same(5, {0.2, 0.7});
        CHECK(fast_nondominated_sort(same) == Fronts{{0, 1, 2, 3, 4}});
    }

    TEST_CASE("nondominated sort matches brute force")
    {
        Rng rng(52);
        for (int trial = 0; trial < 200; ++trial) {
            const auto pts = random_points(rng, 1 + rng.index(64));
            CHECK(fast_nondominated_sort(pts) == brute_fronts(pts));
        }
    }

    TEST_CASE("crowding distance")
    {
        constexpr double inf = std::numeric_limits<double>::infinity();
        const std::vector<FitnessVector> two = {{0.1, 2}, {0.9, 1}};
        CHECK(crowding_distance(two) == std::vector<double>{inf, inf});

        const std::vector<FitnessVector> line = {{0, 2}, {1, 1}, {2, 0}};
        const auto d = crowding_distance(line);
        CHECK(d[0] == inf);
        CHECK(d[2] == inf);
        CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-15));

        const std::vector<FitnessVector> dup = {{0, 2}, {1, 1}, {1, 1}, {2, 0}};
        for (double v : crowding_distance(dup)) {
            CHECK_FALSE(std::isnan(v));
        }
        const std::vector<FitnessVector> flat(4, {0.5, 0.5});
        for (double v : crowding_distance(flat)) {
            CHECK_FALSE(std::isnan(v));
        }
    }

    TEST_CASE("tournament tie rules")
    {
        std::vector<Individual> pop(3);
        pop[0].rank = 0;
        pop[1].rank = 3;
        CHECK(tournament_winner(pop, 0, 1) == 0);
        CHECK(tournament_winner(pop, 1, 0) == 0);

        pop[1].rank = 0;
        pop[0].crowding = std::numeric_limits<double>::infinity();
        pop[1].crowding = 1.2;
        CHECK(tournament_winner(pop, 1, 0) == 0);

        pop[1].crowding = pop[0].crowding;
        CHECK(tournament_winner(pop, 0, 1) == 0);
        CHECK(tournament_winner(pop, 1, 0) == 1);
    }

    TEST_CASE("survivor selection keeps the best by rank then crowding")
    {
        Rng rng(53);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<Individual> pool(2 + rng.index(40));
            for (auto& ind : pool) {
                ind.fitness = ind.masked = {rng.uniform(), rng.uniform(0, 3)};
            }
            const std::size_t n = 1 + rng.index(pool.size());
            const auto survivors = select_survivors(pool, n);
            REQUIRE(survivors.size() == n);
            std::vector<FitnessVector> pts;
            for (const auto& ind : pool) {
                pts.push_back(ind.masked);
            }
            const Fronts fronts = brute_fronts(pts);
            // every member of a front better than the worst survivor's front is kept
            const int worst = survivors.back().rank;
            std::size_t better = 0;
            for (int k = 0; k < worst; ++k) {
                better += fronts[static_cast<std::size_t>(k)].size();
            }
            CHECK(std::count_if(survivors.begin(), survivors.end(),
                                [&](const Individual& s) { return s.rank < worst; }) ==
                  static_cast<std::ptrdiff_t>(better));
            for (std::size_t i = 1; i < survivors.size(); ++i) {
                CHECK(survivors[i - 1].rank <= survivors[i].rank);
            }
        }
    }

    TEST_CASE("sbx fixed points")
    {
        Rng rng(54);
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(-1, 1);
            const auto [c1, c2] = sbx(x, x, 10.0, -1, 1, rng);
            CHECK(c1 == x);
            CHECK(c2 == x);
        }
        CHECK(sbx_spread(0.5, 10.0) == 1.0);
        const auto [a, b] = sbx_children(0.2, 0.7, 1.0);
        CHECK(a == 0.2);
        CHECK(b == 0.7);
    }

    TEST_CASE("sbx preserves the parent mean and follows the spread density")
    {
        Rng rng(55);
        const double eta = 10.0;
        int below_half = 0;
        int below_one = 0;
        const int n = 100000;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x1 = rng.uniform(-1, 1);
            const double x2 = rng.uniform(-1, 1);
            const double beta = sbx_spread(rng.uniform(), eta);
            const auto [c1, c2] = sbx_children(x1, x2, beta);
            worst = std::max(worst, std::abs((c1 + c2) / 2 - (x1 + x2) / 2));
            below_half += beta <= 0.5 ? 1 : 0;
            below_one += beta <= 1.0 ? 1 : 0;
        }
        CHECK(worst < 1e-9);
        // CDF of the spread: 0.5 * b^(eta+1) for b <= 1
        CHECK(below_half / double(n) == doctest::Approx(0.5 * std::pow(0.5, eta + 1)).epsilon(0.5));
        CHECK(below_one / double(n) == doctest::Approx(0.5).epsilon(0.01));
    }

    TEST_CASE("polynomial mutation")
    {
        Rng rng(56);
        for (int i = 0; i < 100; ++i) {
            const double x = rng.uniform(-1, 1);
            CHECK(polynomial_mutation(x, 20, -1, 1, 0.0, rng) == x);
        }
        for (int i = 0; i < 10000; ++i) {
            const double u = rng.uniform();
            CHECK(polynomial_perturb(0.0, u, 20, 0.0, 1.0) >= 0.0);
            CHECK(polynomial_perturb(1.0, u, 20, 0.0, 1.0) <= 1.0);
            const double y = polynomial_mutation(rng.uniform(0.1, 10), 20, 0.1, 10, 1.0, rng);
            CHECK(y >= 0.1);
            CHECK(y <= 10);
        }
        double sum = 0.0;
        double sq = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double y = polynomial_mutation(0.5, 20, 0.0, 1.0, 1.0, rng);
            sum += y;
            sq += y * y;
        }
        const double mean = sum / n;
        const double sd = std::sqrt(sq / n - mean * mean);
        CHECK(std::abs(mean - 0.5) < 3 * sd / std::sqrt(double(n)));
    }

    TEST_CASE("neuron matching")
    {
        Rng rng(57);
        for (int i = 0; i < 10000; ++i) {
            const Genome a = random_genome(rng);
            const Genome b = random_genome(rng);
            CHECK(is_permutation(match_neurons(a, b)));
            if (i < 200) {
                const NeuronMatch id = match_neurons(a, a);
                for (std::size_t k = 0; k < kNeurons; ++k) {
                    CHECK(id[k] == k);
                }
            }
        }

        // first two neurons carry the distinguishing feature; the rest are far away
        Genome a;
        Genome b;
        for (std::size_t k = 2; k < kNeurons; ++k) {
            a.kohonen[k].fill(1.0);
            b.kohonen[k].fill(1.0);
        }
        a.kohonen[0][0] = 0.0;
        a.kohonen[1][0] = 1.0;
        b.kohonen[0][0] = 0.9;
        b.kohonen[1][0] = 0.1;
        const NeuronMatch m = match_neurons(a, b);
        CHECK(m[0] == 1);
        CHECK(m[1] == 0);
    }

    TEST_CASE("phase-1 crossover keeps kohonen layers")
    {
        Rng rng(58);
        VariationConfig cfg;
        for (int i = 0; i < 500; ++i) {
            const Genome p1 = random_genome(rng);
            const Genome p2 = random_genome(rng);
            const auto [c1, c2] = crossover_phase1(p1, p2, ControllerKind::CPNC, cfg, rng);
            CHECK(c1.kohonen == p1.kohonen);
            CHECK(c2.kohonen == p2.kohonen);
            CHECK(satisfies_invariants(c1));
            CHECK(satisfies_invariants(c2));
        }
        VariationConfig none;
        none.p_cross_phase1 = 0.0;
        none.p_mut = 0.0;
        for (auto kind : {ControllerKind::CPNC, ControllerKind::FFNC}) {
            const Genome p1 = random_genome(rng);
            const Genome p2 = random_genome(rng);
            const auto [c1, c2] = crossover_phase1(p1, p2, kind, none, rng);
            CHECK(c1 == p1);
            CHECK(c2 == p2);
        }
    }

    TEST_CASE("phase-1 crossover preserves the grossberg mean")
    {
        VariationConfig cfg;
        cfg.p_mut = 0.0;
        cfg.eta_c = 40.0; // narrow spread so clipping never engages
        Rng rng(59);
        for (int i = 0; i < 500; ++i) {
            Genome p1 = random_genome(rng);
            Genome p2 = random_genome(rng);
            for (std::size_t k = 0; k < kNeurons; ++k) {
                p1.grossberg[k] = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
                p2.grossberg[k] = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
            }
            const auto [c1, c2] = crossover_phase1(p1, p2, ControllerKind::CPNC, cfg, rng);
            for (std::size_t k = 0; k < kNeurons; ++k) {
                for (std::size_t o = 0; o < kOutputs; ++o) {
                    CHECK(std::abs(c1.grossberg[k][o] + c2.grossberg[k][o] - p1.grossberg[k][o] - p2.grossberg[k][o]) <
                          1e-12);
                }
            }
        }
    }

    TEST_CASE("phase-2 crossover tosses one coin per matched pair")
    {
        VariationConfig cfg;
        cfg.p_mut = 0.0;
        Rng rng(60);
        int crossed = 0;
        int pairs = 0;
        int mixed = 0;
        for (int i = 0; i < 2000; ++i) {
            const Genome p1 = random_genome(rng);
            const Genome p2 = random_genome(rng);
            const NeuronMatch m = match_neurons(p1, p2);
            const auto [c1, c2] = crossover_phase2(p1, p2, ControllerKind::CPNC, cfg, rng);
            CHECK(encode(c1).size() == 163);
            CHECK(satisfies_invariants(c1));
            CHECK(satisfies_invariants(c2));
            int here = 0;
            for (std::size_t k = 0; k < kNeurons; ++k) {
                const bool a = c1.kohonen[k] != p1.kohonen[k];
                const bool b = c2.kohonen[m[k]] != p2.kohonen[m[k]];
                CHECK(a == b);
                if (!a) {
                    // an uncrossed pair is copied intact
                    CHECK(c1.grossberg[k] == p1.grossberg[k]);
                    CHECK(c2.grossberg[m[k]] == p2.grossberg[m[k]]);
                }
                here += a ? 1 : 0;
                ++pairs;
            }
            crossed += here;
            mixed += (here > 0 && here < static_cast<int>(kNeurons)) ? 1 : 0;
        }
        CHECK(crossed / double(pairs) == doctest::Approx(0.5).epsilon(0.05));
        CHECK(mixed > 1900);

        const Genome p = random_genome(rng);
        const auto [s1, s2] = crossover_phase2(p, p, ControllerKind::CPNC, cfg, rng);
        CHECK(s1 == p);
        CHECK(s2 == p);
    }

    TEST_CASE("phase-1 groups")
    {
        const MazeSpec maze = load_maze(test::repo_path("data/mazes/training.maze"));
        EvoConfig cfg;
        cfg.phase1_gens = 0;
        Rng rng(61);
        const Phase1Result r = run_phase1(cfg, SimulationConfig{}, maze, rng);
        REQUIRE(r.groups.size() == 4);
        for (const auto& g : r.groups) {
            CHECK(g.size() == 14);
        }
        CHECK(r.generations.empty());

        EvoConfig mismatch;
        mismatch.groups = 5;
        mismatch.group_size = 14;
        mismatch.pop_size = 70;
        Rng rng2(61);
        CHECK_THROWS_AS(run_phase1(mismatch, SimulationConfig{}, maze, rng2), ConfigError);
    }

    TEST_CASE("phase 2 with no generations returns the merged population")
    {
        const MazeSpec maze = load_maze(test::repo_path("data/mazes/training.maze"));
        EvoConfig cfg;
        cfg.phase1_gens = 0;
        cfg.phase2_gens = 0;
        cfg.lamarckian = false;
        Rng rng(62);
        Phase1Result p1 = run_phase1(cfg, short_episodes(), maze, rng);
        std::vector<Genome> before;
        for (const auto& g : p1.groups) {
            for (const auto& ind : g) {
                before.push_back(ind.genome);
            }
        }
        const Phase2Result p2 = run_phase2(p1.groups, cfg, short_episodes(), maze, rng);
        REQUIRE(p2.population.size() == 56);
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(p2.population[i].genome == before[i]);
        }
        CHECK(p2.generations.empty());
    }

    TEST_CASE("run numbering, elitism and fronts")
    {
        const MazeSpec maze = load_maze(test::repo_path("data/mazes/training.maze"));
        for (auto mode : {Mode::MOOP, Mode::SOOP_F1, Mode::SOOP_F2}) {
            const EvoConfig cfg = small_config(ControllerKind::CPNC, mode, 3, 4);
            const RunResult r = run_evolution(cfg, short_episodes(), maze);
            REQUIRE(r.generations.size() == 7);
            for (std::size_t k = 0; k < 7; ++k) {
                CHECK(r.generations[k].gen == static_cast<int>(k) + 1);
            }
            for (std::size_t k = 1; k < 7; ++k) {
                if (k == 3) {
                    continue; // phase 2 re-scores everyone on all starts
                }
                const auto& prev = r.generations[k - 1];
                const auto& cur = r.generations[k];
                if (mode != Mode::SOOP_F2) {
                    CHECK(cur.best_f1 >= prev.best_f1);
                }
                if (mode != Mode::SOOP_F1) {
                    CHECK(cur.best_f2 >= prev.best_f2);
                }
            }
            REQUIRE_FALSE(r.final_front.empty());
            for (std::size_t i : r.final_front) {
                for (std::size_t j : r.final_front) {
                    CHECK_FALSE(dominates(r.final_population[i].masked, r.final_population[j].masked));
                }
                if (mode == Mode::SOOP_F2) {
                    CHECK(r.final_population[i].fitness.f2 == r.generations.back().best_f2);
                }
            }
            for (const auto& ind : r.final_population) {
                CHECK(satisfies_invariants(ind.genome));
            }
        }
    }

    TEST_CASE("runs are deterministic across thread counts")
    {
        const MazeSpec maze = load_maze(test::repo_path("data/mazes/training.maze"));
        for (auto kind : {ControllerKind::CPNC, ControllerKind::FFNC}) {
            EvoConfig cfg = small_config(kind, Mode::MOOP, 2, 2);
            const RunResult a = run_evolution(cfg, short_episodes(), maze);
            cfg.threads = 3;
            const RunResult b = run_evolution(cfg, short_episodes(), maze);
            REQUIRE(a.final_population.size() == b.final_population.size());
            for (std::size_t i = 0; i < a.final_population.size(); ++i) {
                CHECK(a.final_population[i].genome == b.final_population[i].genome);
                CHECK(a.final_population[i].fitness == b.final_population[i].fitness);
            }
            CHECK(a.final_front == b.final_front);
            for (std::size_t k = 0; k < a.generations.size(); ++k) {
                CHECK(a.generations[k].fitness == b.generations[k].fitness);
            }
        }
    }

    TEST_CASE("configuration errors")
    {
        EvoConfig cfg;
        cfg.pop_size = 50;
        CHECK_THROWS_AS(validate_evo_config(cfg), ConfigError);
        cfg = EvoConfig{};
        cfg.variation.p_mut = 1.5;
        CHECK_THROWS_AS(validate_evo_config(cfg), ConfigError);
        cfg = EvoConfig{};
        cfg.phase2_gens = -1;
        CHECK_THROWS_AS(validate_evo_config(cfg), ConfigError);
    }
}
