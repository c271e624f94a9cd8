#pragma once

#include "cpnc/geometry.hpp"
#include "cpnc/maze.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cpnc {

inline constexpr std::size_t kSensorSites = 8;
inline constexpr std::size_t kSensorCount = 2 * kSensorSites;

/// Khepera-like differential-drive robot. Lengths in cm, time in s, angles in rad.
struct RobotParams {
    double body_radius = 2.75;
    double wheel_radius = 1.0;
    double axle_length = 5.5;
    double dt = 5.0;
    double speed_limit = 0.5; // wheel angular speed, rad/s
    double ir_range = 5.0;
    double ir_half_span = 3.0 * std::numbers::pi / 180.0;
    double target_range = 100.0;
    double target_half_span = 15.0 * std::numbers::pi / 180.0;
    std::array<double, kSensorSites> sensor_headings = {
        0.0,
        std::numbers::pi / 4,
        std::numbers::pi / 2,
        3 * std::numbers::pi / 4,
        std::numbers::pi,
        5 * std::numbers::pi / 4,
        3 * std::numbers::pi / 2,
        7 * std::numbers::pi / 4,
    };

    friend bool operator==(const RobotParams&, const RobotParams&) = default;
};

/// Throws ConfigError on non-positive lengths or duplicated sensor headings.
void validate_params(const RobotParams& params);

/// Activations in [0,1]: entries [0,8) are obstacle (IR) sensors, [8,16) target sensors.
/// Entry i and i+8 share the mounting site at sensor_headings[i].
using SensorVector = std::array<double, kSensorCount>;

struct WheelCommand {
    double left = 0.0;
    double right = 0.0;
};

/// Exact unicycle update over one dt; commands are clamped to +-speed_limit.
Pose step_kinematics(const Pose& pose, double wl, double wr, const RobotParams& params);

SensorVector read_sensors(const MazeSpec& maze, const Pose& pose, std::span<const std::size_t> remaining,
                          const RobotParams& params);

/// Largest IR activation in a reading.
double max_obstacle_activation(const SensorVector& s);

enum class Termination { Collision, StepLimit };

std::string to_string(Termination t);

struct StepEvents {
    bool collided = false;
    std::vector<std::size_t> targets_hit;
};

struct EpisodeState {
    Pose pose;
    int step = 0;
    std::vector<std::size_t> remaining; // ascending maze target indices
    int consumed_count = 0;
    std::optional<Termination> terminated;
    std::vector<Pose> path;           // path.size() == step + 1
    std::vector<StepEvents> events;   // events[k] belongs to the move ending at path[k+1]
};

EpisodeState start_episode(const MazeSpec& maze, const Pose& start);

/// Executes one control step. On wall contact the move is undone and the episode ends;
/// when the last remaining target is consumed the full target set reappears.
/// Throws std::logic_error if the episode already terminated.
StepEvents advance(EpisodeState& state, const MazeSpec& maze, double wl, double wr, const RobotParams& params,
                   int max_steps);

/// Path trace CSV: `step,x,y,heading,event`.
void write_path_csv(std::ostream& out, const EpisodeState& state);

struct TraceRow {
    int step = 0;
    Pose pose;
    std::string event;
};

std::vector<TraceRow> read_path_csv(std::istream& in);

} // namespace cpnc
