#include "support.hpp"

#include "cpnc/fitness.hpp"
#include "cpnc/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpnc;

namespace {

Policy constant(double wl, double wr)
{
    return [=](const SensorVector&, int) { return WheelCommand{wl, wr}; };
}

} // namespace

TEST_SUITE("fitness")
{
    TEST_CASE("f1_step examples")
    {
        CHECK(f1_step(0.5, 0.5, 0.0) == 1.0);
        CHECK(f1_step(0.5, -0.5, 0.0) == 0.0);
        CHECK(f1_step(0.5, 0.5, 0.19) == doctest::Approx(0.81).epsilon(1e-15));
        CHECK(f1_step(0.3, 0.1, 0.5) == doctest::Approx(0.4 * (1 - std::sqrt(0.2)) * 0.5).epsilon(1e-15));
    }

    TEST_CASE("f2_step examples")
    {
        const FitnessConfig cfg;
        CHECK(f2_step(true, 12.0, cfg) == 50.0);
        CHECK(f2_step(false, 0.0, cfg) == 1.0);
        CHECK(f2_step(false, 4.0, cfg) == 0.2);
    }

    TEST_CASE("f1_step stays in [0,1]")
    {
        Rng rng(41);
        for (int i = 0; i < 10000; ++i) {
            const double v = f1_step(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform());
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    TEST_CASE("standing still scores only proximity")
    {
        const RobotParams rp;
        const FitnessConfig cfg;
        MazeSpec m = test::box_maze(60, 40);
        m.targets = {{40, 20}};
        const EpisodeResult r = run_policy_episode(m, {{20, 20}, 0}, constant(0, 0), cfg, rp);
        CHECK(r.steps == 200);
        CHECK(r.fitness.f1 == 0.0);
        CHECK(r.fitness.f2 == doctest::Approx(1.0 / 21.0).epsilon(1e-13));
        CHECK(r.trace.pose.position == Point2{20, 20});
    }

    TEST_CASE("immediate collision scores a single step")
    {
        const RobotParams rp;
        const FitnessConfig cfg;
        MazeSpec m = test::box_maze(60, 40);
        m.targets = {{10, 20}};
        const Pose start{{60 - 3.75, 20}, 0};
        const EpisodeResult r = run_policy_episode(m, start, constant(0.5, 0.5), cfg, rp);
        CHECK(r.steps == 1);
        CHECK(r.termination == Termination::Collision);
        // periphery 1 cm from the wall: the center ray reads 1 - 1/5
        CHECK(r.fitness.f1 == doctest::Approx((1.0 - 0.8) / 200).epsilon(1e-12));
        CHECK(r.fitness.f2 == doctest::Approx(1.0 / (1.0 + (60 - 3.75 - 10)) / 200).epsilon(1e-12));
    }

    TEST_CASE("scripted straight run")
    {
        const RobotParams rp;
        const FitnessConfig cfg;
        MazeSpec m = test::box_maze(300, 40);
        m.targets = {{150, 39}};
        const Policy script = [](const SensorVector&, int step) {
            return step < 100 ? WheelCommand{0.5, 0.5} : WheelCommand{-0.5, 0.5};
        };
        const EpisodeResult r = run_policy_episode(m, {{10, 20}, 0}, script, cfg, rp);
        CHECK(r.steps == 200);
        CHECK(r.termination == Termination::StepLimit);
        CHECK(r.fitness.f1 == doctest::Approx(0.5).epsilon(1e-13));
        CHECK_FALSE(r.first_hit_step);
    }

    TEST_CASE("hit step scores H and is recorded")
    {
        const RobotParams rp;
        const FitnessConfig cfg;
        MazeSpec m = test::box_maze(60, 40);
        m.targets = {{25, 20}};
        const EpisodeResult r = run_policy_episode(m, {{20, 20}, 0}, constant(0.5, 0.5), cfg, rp);
        REQUIRE(r.first_hit_step);
        CHECK(*r.first_hit_step == 1);
        CHECK(r.targets_hit >= 1);
        CHECK(r.fitness.f2 >= 50.0 / 200);
    }

    TEST_CASE("objective ranges over random episodes")
    {
        const RobotParams rp;
        const FitnessConfig cfg{40, 50.0};
        const MazeSpec m = load_maze(test::repo_path("data/mazes/training.maze"));
        Rng rng(42);
        for (int i = 0; i < 2000; ++i) {
            const double a = rng.uniform(-0.5, 0.5);
            const double b = rng.uniform(-0.5, 0.5);
            const Policy p = [&](const SensorVector& s, int) {
                return WheelCommand{a + 0.3 * s[0], b - 0.3 * s[8]};
            };
            const Pose start = m.starts[rng.index(m.starts.size())];
            const EpisodeResult r = run_policy_episode(m, start, p, cfg, rp);
            CHECK(r.fitness.f1 >= 0.0);
            CHECK(r.fitness.f1 <= 1.0);
            CHECK(r.fitness.f2 >= 0.0);
            CHECK(r.fitness.f2 <= 50.0);
        }
    }

    TEST_CASE("longer horizons never lower the raw sums")
    {
        const RobotParams rp;
        const MazeSpec m = load_maze(test::repo_path("data/mazes/training.maze"));
        Rng rng(43);
        for (int i = 0; i < 100; ++i) {
            const double a = rng.uniform(-0.5, 0.5);
            const double b = rng.uniform(-0.5, 0.5);
            const int n = 1 + static_cast<int>(rng.index(150));
            const EpisodeResult shorter = run_policy_episode(m, m.starts[0], constant(a, b), {n, 50.0}, rp);
            const EpisodeResult longer = run_policy_episode(m, m.starts[0], constant(a, b), {n + 50, 50.0}, rp);
            CHECK(shorter.fitness.f1 * n <= longer.fitness.f1 * (n + 50) + 1e-12);
            CHECK(shorter.fitness.f2 * n <= longer.fitness.f2 * (n + 50) + 1e-12);
        }
    }

    TEST_CASE("frozen episodes never touch the genome")
    {
        const SimulationConfig sim;
        const MazeSpec m = load_maze(test::repo_path("data/mazes/training.maze"));
        Rng rng(44);
        for (int i = 0; i < 20; ++i) {
            const Genome g = random_genome(rng);
            for (auto kind : {ControllerKind::CPNC, ControllerKind::FFNC}) {
                CHECK(run_episode(kind, g, m, m.starts[0], EpisodeMode::Frozen, sim).second == g);
            }
            CHECK(run_episode(ControllerKind::FFNC, g, m, m.starts[0], EpisodeMode::Learn, sim).second == g);
        }
    }

    TEST_CASE("learning episodes move only kohonen genes")
    {
        const SimulationConfig sim;
        const MazeSpec m = load_maze(test::repo_path("data/mazes/training.maze"));
        Rng rng(45);
        const Genome g = random_genome(rng);
        const auto [r, learned] = run_episode(ControllerKind::CPNC, g, m, m.starts[0], EpisodeMode::Learn, sim);
        CHECK(learned.grossberg == g.grossberg);
        CHECK(learned.slope == g.slope);
        CHECK(learned.kohonen != g.kohonen);
        CHECK(satisfies_invariants(learned));
    }

    TEST_CASE("evaluate averages frozen episodes after learning")
    {
        const SimulationConfig sim;
        const MazeSpec m = load_maze(test::repo_path("data/mazes/training.maze"));
        Rng rng(46);
        for (int i = 0; i < 5; ++i) {
            const Genome g = random_genome(rng);

            const Evaluation one = evaluate(ControllerKind::CPNC, g, m, std::span(m.starts).first(1), sim);
            const Genome learned = run_episode(ControllerKind::CPNC, g, m, m.starts[0], EpisodeMode::Learn, sim).second;
            const EpisodeResult frozen =
                run_episode(ControllerKind::CPNC, learned, m, m.starts[0], EpisodeMode::Frozen, sim).first;
            CHECK(one.genome == learned);
            CHECK(one.fitness == frozen.fitness);

            const Evaluation ff = evaluate(ControllerKind::FFNC, g, m, m.starts, sim);
            CHECK(ff.genome == g);
            double f1 = 0.0;
            double f2 = 0.0;
            for (const auto& s : m.starts) {
                const auto r = run_episode(ControllerKind::FFNC, g, m, s, EpisodeMode::Frozen, sim).first;
                f1 += r.fitness.f1;
                f2 += r.fitness.f2;
            }
            CHECK(ff.fitness.f1 == doctest::Approx(f1 / 4).epsilon(1e-14));
            CHECK(ff.fitness.f2 == doctest::Approx(f2 / 4).epsilon(1e-14));
        }
        CHECK_THROWS_AS(evaluate(ControllerKind::CPNC, Genome{}, m, {}, sim), std::invalid_argument);
    }

    TEST_CASE("episode summary json")
    {
        const RobotParams rp;
        const FitnessConfig cfg;
        const MazeSpec m = test::box_maze(60, 40);
        const EpisodeResult r = run_policy_episode(m, {{10, 10}, 0}, constant(0, 0), cfg, rp);
        const std::string js = episode_summary_json(r);
        CHECK(js.find("\"first_hit_step\":null") != std::string::npos);
        CHECK(js.find("\"termination\":\"step-limit\"") != std::string::npos);
    }
}
