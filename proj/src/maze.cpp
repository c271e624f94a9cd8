#include "cpnc/maze.hpp"

#include "cpnc/error.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cpnc {

namespace {

using nlohmann::json;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::vector<double> numbers(const json& j, std::size_t arity, const char* what)
{
    if (!j.is_array() || j.size() != arity) {
        throw ParseError(std::string(what) + ": expected an array of " + std::to_string(arity) + " numbers");
    }
    std::vector<double> out;
    out.reserve(arity);
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw ParseError(std::string(what) + ": non-numeric entry");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

const json& required(const json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError(std::string("maze: missing key '") + key + "'");
    }
    return *it;
}

// Number of probe directions used for the closed-boundary check.
constexpr int kBoundaryProbes = 72;

} // namespace

void validate_maze(const MazeSpec& maze)
{
    const Bounds& b = maze.bounds;
    if (!(b.xmin < b.xmax && b.ymin < b.ymax)) {
        throw ValidationError("maze '" + maze.name + "': degenerate bounds");
    }
    if (maze.targets.empty()) {
        throw ValidationError("maze '" + maze.name + "': no targets");
    }
    if (maze.starts.empty()) {
        throw ValidationError("maze '" + maze.name + "': no start poses");
    }
    for (const auto& w : maze.walls) {
        if (!finite(w.a) || !finite(w.b)) {
            throw ValidationError("maze '" + maze.name + "': non-finite wall coordinate");
        }
        if (w.a == w.b) {
            throw ValidationError("maze '" + maze.name + "': zero-length wall");
        }
    }
    for (std::size_t i = 0; i < maze.targets.size(); ++i) {
        if (!finite(maze.targets[i]) || !b.strictly_contains(maze.targets[i])) {
            throw ValidationError("maze '" + maze.name + "': target " + std::to_string(i) + " outside bounds");
        }
    }
    for (std::size_t i = 0; i < maze.starts.size(); ++i) {
        const Pose& s = maze.starts[i];
        if (!finite(s.position) || !std::isfinite(s.heading) || !b.strictly_contains(s.position)) {
            throw ValidationError("maze '" + maze.name + "': start " + std::to_string(i) + " outside bounds");
        }
    }

    // Every ray leaving an interior point of interest must be stopped by a wall.
    const double range = b.diagonal();
    auto probe = [&](Point2 origin) {
        for (int k = 0; k < kBoundaryProbes; ++k) {
            const double angle = 2.0 * std::numbers::pi * k / kBoundaryProbes;
            if (!ray_cast(maze, origin, angle, range)) {
                throw ValidationError("maze '" + maze.name + "': outer boundary is not closed");
            }
        }
    };
    for (const auto& t : maze.targets) {
        probe(t);
    }
    for (const auto& s : maze.starts) {
        probe(s.position);
    }
}

MazeSpec parse_maze(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("maze: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("maze: top level must be an object");
    }

    MazeSpec maze;
    const json& name = required(doc, "name");
    if (!name.is_string()) {
        throw ParseError("maze: 'name' must be a string");
    }
    maze.name = name.get<std::string>();

    auto bounds = numbers(required(doc, "bounds"), 4, "bounds");
    maze.bounds = {bounds[0], bounds[1], bounds[2], bounds[3]};

    const json& walls = required(doc, "walls");
    const json& targets = required(doc, "targets");
    const json& starts = required(doc, "starts");
    if (!walls.is_array() || !targets.is_array() || !starts.is_array()) {
        throw ParseError("maze: 'walls', 'targets' and 'starts' must be arrays");
    }
    for (const auto& w : walls) {
        auto v = numbers(w, 4, "wall");
        maze.walls.push_back({{v[0], v[1]}, {v[2], v[3]}});
    }
    for (const auto& t : targets) {
        auto v = numbers(t, 2, "target");
        maze.targets.push_back({v[0], v[1]});
    }
    for (const auto& s : starts) {
        auto v = numbers(s, 3, "start");
        maze.starts.push_back({{v[0], v[1]}, normalize_angle(v[2])});
    }

    validate_maze(maze);
    return maze;
}

MazeSpec load_maze(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("maze: cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_maze(buf.str());
}

std::string maze_to_json(const MazeSpec& maze)
{
    json doc;
    doc["name"] = maze.name;
    doc["bounds"] = {maze.bounds.xmin, maze.bounds.ymin, maze.bounds.xmax, maze.bounds.ymax};
    doc["walls"] = json::array();
    for (const auto& w : maze.walls) {
        doc["walls"].push_back({w.a.x, w.a.y, w.b.x, w.b.y});
    }
    doc["targets"] = json::array();
    for (const auto& t : maze.targets) {
        doc["targets"].push_back({t.x, t.y});
    }
    doc["starts"] = json::array();
    for (const auto& s : maze.starts) {
        doc["starts"].push_back({s.position.x, s.position.y, s.heading});
    }
    return doc.dump(2) + "\n";
}

void save_maze(const MazeSpec& maze, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("maze: cannot write " + path.string());
    }
    out << maze_to_json(maze);
}

std::optional<double> ray_cast(std::span<const Segment> walls, Point2 origin, double angle, double max_range)
{
    const Point2 dir{std::cos(angle), std::sin(angle)};
    std::optional<double> best;
    for (const auto& w : walls) {
        if (auto t = ray_segment_distance(origin, dir, w); t && *t <= max_range && (!best || *t < *best)) {
            best = t;
        }
    }
    return best;
}

std::optional<double> ray_cast(const MazeSpec& maze, Point2 origin, double angle, double max_range)
{
    return ray_cast(std::span<const Segment>(maze.walls), origin, angle, max_range);
}

bool collides(std::span<const Segment> walls, Point2 center, double radius)
{
    for (const auto& w : walls) {
        if (point_segment_distance(center, w) < radius) {
            return true;
        }
    }
    return false;
}

bool collides(const MazeSpec& maze, Point2 center, double radius)
{
    return collides(std::span<const Segment>(maze.walls), center, radius);
}

NearestTarget nearest_target(Point2 p, std::span<const Point2> remaining)
{
    if (remaining.empty()) {
        throw std::invalid_argument("nearest_target: empty target list");
    }
    NearestTarget best{0, distance(p, remaining[0])};
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        const double d = distance(p, remaining[i]);
        if (d < best.distance) {
            best = {i, d};
        }
    }
    return best;
}

NearestTarget nearest_target(Point2 p, std::span<const Point2> targets, std::span<const std::size_t> indices)
{
    if (indices.empty()) {
        throw std::invalid_argument("nearest_target: empty target list");
    }
    NearestTarget best{0, distance(p, targets[indices[0]])};
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const double d = distance(p, targets[indices[i]]);
        if (d < best.distance) {
            best = {i, d};
        }
    }
    return best;
}

} // namespace cpnc
