#pragma once

#include "cpnc/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cpnc {

struct Bounds {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    bool strictly_contains(Point2 p) const { return p.x > xmin && p.x < xmax && p.y > ymin && p.y < ymax; }
    double diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

    friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Static arena: zero-thickness wall segments, target points and start poses.
/// Immutable after loading; every query below is a pure function.
struct MazeSpec {
    std::string name;
    Bounds bounds;
    std::vector<Segment> walls;
    std::vector<Point2> targets;
    std::vector<Pose> starts;

    friend bool operator==(const MazeSpec&, const MazeSpec&) = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate_maze(const MazeSpec& maze);

/// Parses the JSON maze format and validates it. Throws ParseError / ValidationError.
MazeSpec parse_maze(const std::string& text);
MazeSpec load_maze(const std::filesystem::path& path);

std::string maze_to_json(const MazeSpec& maze);
void save_maze(const MazeSpec& maze, const std::filesystem::path& path);

/// Distance to the nearest wall hit along the ray, or nullopt when nothing lies within max_range.
std::optional<double> ray_cast(std::span<const Segment> walls, Point2 origin, double angle, double max_range);
std::optional<double> ray_cast(const MazeSpec& maze, Point2 origin, double angle, double max_range);

/// True iff some wall passes closer than `radius` to `center`.
bool collides(std::span<const Segment> walls, Point2 center, double radius);
bool collides(const MazeSpec& maze, Point2 center, double radius);

struct NearestTarget {
    std::size_t index = 0;
    double distance = 0.0;
};

/// Lowest index wins distance ties. Throws std::invalid_argument on an empty list.
NearestTarget nearest_target(Point2 p, std::span<const Point2> remaining);

/// Same query over a subset of `targets` given by `indices`; the returned index is a position in `indices`.
NearestTarget nearest_target(Point2 p, std::span<const Point2> targets, std::span<const std::size_t> indices);

} // namespace cpnc
