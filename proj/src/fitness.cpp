#include "cpnc/fitness.hpp"

#include "cpnc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cpnc {

void validate_fitness_config(const FitnessConfig& cfg)
{
    if (cfg.max_step <= 0 || !(cfg.hit_score > 0.0)) {
        throw ConfigError("fitness: max_step and H must be positive");
    }
}

double f1_step(double wl, double wr, double max_ir_activation)
{
    const double v = std::abs(wl + wr);
    const double dv = std::abs(wl - wr);
    return v * (1.0 - std::sqrt(dv)) * (1.0 - max_ir_activation);
}

double f2_step(bool hit, double nearest_distance, const FitnessConfig& cfg)
{
    return hit ? cfg.hit_score : 1.0 / (1.0 + nearest_distance);
}

std::string episode_summary_json(const EpisodeResult& r)
{
    nlohmann::json j;
    j["f1"] = r.fitness.f1;
    j["f2"] = r.fitness.f2;
    j["steps"] = r.steps;
    j["termination"] = to_string(r.termination);
    j["first_hit_step"] = r.first_hit_step ? nlohmann::json(*r.first_hit_step) : nlohmann::json(nullptr);
    return j.dump();
}

EpisodeResult run_policy_episode(const MazeSpec& maze, const Pose& start, const Policy& policy,
                                 const FitnessConfig& cfg, const RobotParams& params)
{
    EpisodeResult result;
    result.trace = start_episode(maze, start);
    EpisodeState& st = result.trace;
    st.path.reserve(static_cast<std::size_t>(cfg.max_step) + 1);
    st.events.reserve(static_cast<std::size_t>(cfg.max_step));

    double sum_f1 = 0.0;
    double sum_f2 = 0.0;
    while (!st.terminated) {
        const SensorVector s = read_sensors(maze, st.pose, st.remaining, params);
        const WheelCommand cmd = policy(s, st.step);
        const double wl = std::clamp(cmd.left, -params.speed_limit, params.speed_limit);
        const double wr = std::clamp(cmd.right, -params.speed_limit, params.speed_limit);
        const StepEvents ev = advance(st, maze, wl, wr, params, cfg.max_step);

        sum_f1 += f1_step(wl, wr, max_obstacle_activation(s));
        const bool hit = !ev.targets_hit.empty();
        if (hit) {
            result.targets_hit += static_cast<int>(ev.targets_hit.size());
            if (!result.first_hit_step) {
                result.first_hit_step = st.step;
            }
            sum_f2 += f2_step(true, 0.0, cfg);
        } else {
            sum_f2 += f2_step(false, nearest_target(st.pose.position, maze.targets, st.remaining).distance, cfg);
        }
    }
    result.steps = st.step;
    result.termination = *st.terminated;
    result.fitness = {sum_f1 / cfg.max_step, sum_f2 / cfg.max_step};
    return result;
}

std::pair<EpisodeResult, Genome> run_episode(ControllerKind kind, const Genome& genome, const MazeSpec& maze,
                                             const Pose& start, EpisodeMode mode, const SimulationConfig& sim)
{
    Genome g = genome;
    const bool learn = mode == EpisodeMode::Learn && kind == ControllerKind::CPNC;
    Policy policy = [&](const SensorVector& s, int step) {
        if (learn) {
            kohonen_update(g, s, learning_rate(step, sim.schedule));
        }
        return forward(kind, g, s);
    };
    EpisodeResult r = run_policy_episode(maze, start, policy, sim.fitness, sim.robot);
    return {std::move(r), g};
}

Evaluation evaluate(ControllerKind kind, const Genome& genome, const MazeSpec& maze, std::span<const Pose> starts,
                    const SimulationConfig& sim)
{
    if (starts.empty()) {
        throw std::invalid_argument("evaluate: no start poses");
    }
    Evaluation ev;
    ev.genome = genome;
    double f1 = 0.0;
    double f2 = 0.0;
    for (const Pose& start : starts) {
        if (kind == ControllerKind::CPNC) {
            ev.genome = run_episode(kind, ev.genome, maze, start, EpisodeMode::Learn, sim).second;
        }
        const EpisodeResult scored = run_episode(kind, ev.genome, maze, start, EpisodeMode::Frozen, sim).first;
        f1 += scored.fitness.f1;
        f2 += scored.fitness.f2;
        ev.reached = ev.reached || scored.first_hit_step.has_value();
    }
    const double n = static_cast<double>(starts.size());
    ev.fitness = {f1 / n, f2 / n};
    return ev;
}

} // namespace cpnc
