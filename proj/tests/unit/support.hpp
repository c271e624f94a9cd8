#pragma once

#include "cpnc/maze.hpp"

#include <filesystem>
#include <string>

namespace cpnc::test {

inline MazeSpec box_maze(double w, double h)
{
    MazeSpec m;
    m.name = "box";
    m.bounds = {0.0, 0.0, w, h};
    m.walls = {{{0, 0}, {w, 0}}, {{w, 0}, {w, h}}, {{w, h}, {0, h}}, {{0, h}, {0, 0}}};
    m.targets = {{w / 2, h / 2}};
    m.starts = {{{w / 4, h / 4}, 0.0}};
    return m;
}

inline std::filesystem::path repo_path(const std::string& rel)
{
    return std::filesystem::path(CPNC_SOURCE_DIR) / rel;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("cpnc_unit_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace cpnc::test
