#include "cpnc/robot.hpp"

#include "cpnc/error.hpp"
#include "cpnc/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace cpnc {

void validate_params(const RobotParams& p)
{
    if (!(p.body_radius > 0 && p.wheel_radius > 0 && p.axle_length > 0 && p.dt > 0 && p.speed_limit > 0 &&
          p.ir_range > 0 && p.ir_half_span >= 0 && p.target_range > 0 && p.target_half_span >= 0)) {
        throw ConfigError("robot: lengths, times and speeds must be positive");
    }
    for (std::size_t i = 0; i < kSensorSites; ++i) {
        for (std::size_t j = i + 1; j < kSensorSites; ++j) {
            if (normalize_angle(p.sensor_headings[i]) == normalize_angle(p.sensor_headings[j])) {
                throw ConfigError("robot: sensor headings must be distinct");
            }
        }
    }
}

Pose step_kinematics(const Pose& pose, double wl, double wr, const RobotParams& params)
{
    wl = std::clamp(wl, -params.speed_limit, params.speed_limit);
    wr = std::clamp(wr, -params.speed_limit, params.speed_limit);
    const double v = params.wheel_radius * (wl + wr) / 2.0;
    const double omega = params.wheel_radius * (wr - wl) / params.axle_length;
    const double theta = pose.heading;

    Pose next = pose;
    if (std::abs(omega) < 1e-9) {
        next.position.x += v * params.dt * std::cos(theta);
        next.position.y += v * params.dt * std::sin(theta);
        next.heading = normalize_angle(theta);
        return next;
    }
    const double turned = theta + omega * params.dt;
    const double r = v / omega;
    next.position.x += r * (std::sin(turned) - std::sin(theta));
    next.position.y -= r * (std::cos(turned) - std::cos(theta));
    next.heading = normalize_angle(turned);
    return next;
}

SensorVector read_sensors(const MazeSpec& maze, const Pose& pose, std::span<const std::size_t> remaining,
                          const RobotParams& params)
{
    SensorVector s{};
    const Point2 c = pose.position;

    // Only walls within reach of some IR ray matter.
    thread_local std::vector<Segment> near;
    near.clear();
    const double reach = params.body_radius + params.ir_range + 1e-9;
    for (const auto& w : maze.walls) {
        if (point_segment_distance(c, w) <= reach) {
            near.push_back(w);
        }
    }

    const double tan_target = std::tan(params.target_half_span);
    for (std::size_t i = 0; i < kSensorSites; ++i) {
        const double axis = pose.heading + params.sensor_headings[i];
        const Point2 u{std::cos(axis), std::sin(axis)};
        const Point2 periphery = c + params.body_radius * u;

        if (!near.empty()) {
            std::optional<double> hit;
            for (double offset : {0.0, -params.ir_half_span, params.ir_half_span}) {
                if (auto d = ray_cast(near, periphery, axis + offset, params.ir_range); d && (!hit || *d < *hit)) {
                    hit = d;
                }
            }
            if (hit) {
                s[i] = std::clamp(1.0 - *hit / params.ir_range, 0.0, 1.0);
            }
        }

        // Targets are sensed through walls.
        std::optional<double> nearest;
        for (std::size_t idx : remaining) {
            const Point2 v = maze.targets[idx] - periphery;
            const double d = norm(v);
            if (d > params.target_range) {
                continue;
            }
            const double along = dot(v, u);
            const double across = cross(u, v);
            const bool in_cone = d == 0.0 || (along > 0.0 && std::abs(across) <= tan_target * along);
            if (in_cone && (!nearest || d < *nearest)) {
                nearest = d;
            }
        }
        if (nearest) {
            s[kSensorSites + i] = std::clamp(1.0 - *nearest / params.target_range, 0.0, 1.0);
        }
    }
    return s;
}

double max_obstacle_activation(const SensorVector& s)
{
    return *std::max_element(s.begin(), s.begin() + kSensorSites);
}

std::string to_string(Termination t)
{
    return t == Termination::Collision ? "collision" : "step-limit";
}

EpisodeState start_episode(const MazeSpec& maze, const Pose& start)
{
    EpisodeState st;
    st.pose = start;
    st.remaining.resize(maze.targets.size());
    for (std::size_t i = 0; i < st.remaining.size(); ++i) {
        st.remaining[i] = i;
    }
    st.path.push_back(start);
    return st;
}

StepEvents advance(EpisodeState& state, const MazeSpec& maze, double wl, double wr, const RobotParams& params,
                   int max_steps)
{
    if (state.terminated) {
        throw std::logic_error("advance: episode already terminated");
    }
    StepEvents ev;
    const Pose next = step_kinematics(state.pose, wl, wr, params);
    if (collides(maze, next.position, params.body_radius)) {
        ev.collided = true;
        state.terminated = Termination::Collision;
    } else {
        state.pose = next;
        std::erase_if(state.remaining, [&](std::size_t idx) {
            if (distance(next.position, maze.targets[idx]) <= params.body_radius) {
                ev.targets_hit.push_back(idx);
                return true;
            }
            return false;
        });
        state.consumed_count += static_cast<int>(ev.targets_hit.size());
        if (state.remaining.empty()) {
            for (std::size_t i = 0; i < maze.targets.size(); ++i) {
                state.remaining.push_back(i);
            }
        }
    }
    ++state.step;
    state.path.push_back(state.pose);
    state.events.push_back(ev);
    if (!state.terminated && state.step >= max_steps) {
        state.terminated = Termination::StepLimit;
    }
    return ev;
}

namespace {

std::string event_text(const StepEvents& ev)
{
    if (ev.collided) {
        return "collision";
    }
    std::string out;
    for (std::size_t idx : ev.targets_hit) {
        if (!out.empty()) {
            out += ';';
        }
        out += "hit:" + std::to_string(idx);
    }
    return out;
}

} // namespace

void write_path_csv(std::ostream& out, const EpisodeState& state)
{
    out << "step,x,y,heading,event\n";
    for (std::size_t k = 0; k < state.path.size(); ++k) {
        const Pose& p = state.path[k];
        out << k << ',' << format_double(p.position.x) << ',' << format_double(p.position.y) << ','
            << format_double(p.heading) << ',' << (k == 0 ? std::string() : event_text(state.events[k - 1])) << '\n';
    }
}

std::vector<TraceRow> read_path_csv(std::istream& in)
{
    std::vector<TraceRow> rows;
    std::string line;
    if (!std::getline(in, line) || line.rfind("step,x,y,heading,event", 0) != 0) {
        throw ParseError("path trace: missing header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 5) {
            throw ParseError("path trace: expected 5 fields: " + line);
        }
        try {
            rows.push_back({std::stoi(f[0]), {{std::stod(f[1]), std::stod(f[2])}, std::stod(f[3])}, f[4]});
        } catch (const std::exception&) {
            throw ParseError("path trace: bad number in: " + line);
        }
    }
    return rows;
}

} // namespace cpnc
