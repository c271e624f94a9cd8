#include "cpnc/config.hpp"

#include "cpnc/error.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace cpnc {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Typed access to one TOML table; remembers which keys were read so leftovers can be reported.
class Section {
public:
    Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

    template <typename T>
    void read(const char* key, T& out)
    {
        const toml::node* node = find(key);
        if (node == nullptr) {
            return;
        }
        if constexpr (std::is_same_v<T, bool>) {
            auto v = node->value_exact<bool>();
            if (!v) {
                fail(key, "a boolean");
            }
            out = *v;
        } else if constexpr (std::is_integral_v<T>) {
            auto v = node->value_exact<std::int64_t>();
            if (!v) {
                fail(key, "an integer");
            }
            if constexpr (std::is_unsigned_v<T>) {
                if (*v < 0) {
                    fail(key, "a non-negative integer");
                }
            } else if (*v < std::numeric_limits<T>::min() || *v > std::numeric_limits<T>::max()) {
                fail(key, "an integer in range");
            }
            out = static_cast<T>(*v);
        } else if constexpr (std::is_floating_point_v<T>) {
            auto v = node->value<double>();
            if (!v || !node->is_number()) {
                fail(key, "a number");
            }
            out = *v;
        } else {
            auto v = node->value_exact<std::string>();
            if (!v) {
                fail(key, "a string");
            }
            out = *v;
        }
    }

    void read_degrees(const char* key, double& radians)
    {
        if (find(key) == nullptr) {
            return;
        }
        double deg = 0.0;
        read(key, deg);
        radians = deg * kDeg;
    }

    template <std::size_t N>
    void read_degrees(const char* key, std::array<double, N>& radians)
    {
        const toml::node* node = find(key);
        if (node == nullptr) {
            return;
        }
        const toml::array* arr = node->as_array();
        if (arr == nullptr || arr->size() != N) {
            fail(key, ("an array of " + std::to_string(N) + " numbers").c_str());
        }
        for (std::size_t i = 0; i < N; ++i) {
            auto v = (*arr)[i].value<double>();
            if (!v || !(*arr)[i].is_number()) {
                fail(key, "an array of numbers");
            }
            radians[i] = *v * kDeg;
        }
    }

    void check_unused() const
    {
        if (table_ == nullptr) {
            return;
        }
        for (auto&& [key, node] : *table_) {
            if (!used_.contains(std::string(key.str()))) {
                throw ConfigError("config: unknown key '" + name_ + "." + std::string(key.str()) + "'");
            }
        }
    }

private:
    const toml::node* find(const char* key)
    {
        if (table_ == nullptr) {
            return nullptr;
        }
        used_.insert(key);
        return table_->get(key);
    }

    [[noreturn]] void fail(const char* key, const char* expected) const
    {
        throw ConfigError("config: '" + name_ + "." + key + "' must be " + expected);
    }

    const toml::table* table_;
    std::string name_;
    std::set<std::string> used_;
};

MazeSpec load_referenced_maze(const std::filesystem::path& path, const char* role)
{
    try {
        return load_maze(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + role + " '" + path.string() + "': " + e.what());
    }
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    toml::table doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: " << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(msg.str());
    }

    static const std::set<std::string> known = {"experiment", "evolution", "fitness", "robot", "learning"};
    for (auto&& [key, node] : doc) {
        if (!known.contains(std::string(key.str())) || !node.is_table()) {
            throw ConfigError("config: unknown section '" + std::string(key.str()) + "'");
        }
    }

    ExperimentConfig cfg;
    cfg.text = text;

    Section exp(doc["experiment"].as_table(), "experiment");
    std::string train_path;
    std::string test_path;
    std::string out_dir = cfg.out_dir.string();
    exp.read("train_maze", train_path);
    exp.read("test_maze", test_path);
    exp.read("runs", cfg.runs);
    exp.read("seed", cfg.master_seed);
    exp.read("out", out_dir);
    exp.read("episode_repeats", cfg.episode_repeats);
    exp.check_unused();
    if (train_path.empty() || test_path.empty()) {
        throw ConfigError("config: experiment.train_maze and experiment.test_maze are required");
    }
    cfg.out_dir = out_dir;

    EvoConfig& evo = cfg.evo;
    Section ev(doc["evolution"].as_table(), "evolution");
    std::string mode = to_string(evo.mode);
    std::string kind = to_string(evo.kind);
    ev.read("mode", mode);
    ev.read("kind", kind);
    ev.read("pop_size", evo.pop_size);
    ev.read("groups", evo.groups);
    ev.read("group_size", evo.group_size);
    ev.read("phase1_gens", evo.phase1_gens);
    ev.read("phase2_gens", evo.phase2_gens);
    ev.read("p_cross_phase1", evo.variation.p_cross_phase1);
    ev.read("p_cross_phase2", evo.variation.p_cross_phase2);
    ev.read("eta_c", evo.variation.eta_c);
    ev.read("eta_m", evo.variation.eta_m);
    ev.read("p_mut", evo.variation.p_mut);
    ev.read("lamarckian", evo.lamarckian);
    ev.read("phase2_all_starts", evo.phase2_all_starts);
    ev.read("threads", evo.threads);
    ev.check_unused();
    try {
        evo.mode = parse_mode(mode);
        evo.kind = parse_controller_kind(kind);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    Section fit(doc["fitness"].as_table(), "fitness");
    fit.read("max_step", cfg.sim.fitness.max_step);
    fit.read("hit_score", cfg.sim.fitness.hit_score);
    fit.check_unused();

    RobotParams& rp = cfg.sim.robot;
    Section rob(doc["robot"].as_table(), "robot");
    rob.read("body_radius", rp.body_radius);
    rob.read("wheel_radius", rp.wheel_radius);
    rob.read("axle_length", rp.axle_length);
    rob.read("dt", rp.dt);
    rob.read("speed_limit", rp.speed_limit);
    rob.read("ir_range", rp.ir_range);
    rob.read_degrees("ir_half_span_deg", rp.ir_half_span);
    rob.read("target_range", rp.target_range);
    rob.read_degrees("target_half_span_deg", rp.target_half_span);
    rob.read_degrees("sensor_headings_deg", rp.sensor_headings);
    rob.check_unused();

    Section learn(doc["learning"].as_table(), "learning");
    learn.read("eta0", cfg.sim.schedule.eta0);
    learn.read("eta_end", cfg.sim.schedule.eta_end);
    learn.read("horizon", cfg.sim.schedule.horizon);
    learn.check_unused();

    cfg.train_maze_path = base_dir / train_path;
    cfg.test_maze_path = base_dir / test_path;
    cfg.train_maze = load_referenced_maze(cfg.train_maze_path, "train_maze");
    cfg.test_maze = load_referenced_maze(cfg.test_maze_path, "test_maze");

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config: cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.seed) {
        cfg.master_seed = *o.seed;
    }
    if (o.runs) {
        cfg.runs = *o.runs;
    }
    if (o.out) {
        cfg.out_dir = *o.out;
    }
    if (o.threads) {
        cfg.evo.threads = *o.threads;
    }
    validate_config(cfg);
}

void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.runs < 1) {
        throw ConfigError("config: experiment.runs must be at least 1");
    }
    if (cfg.episode_repeats < 1) {
        throw ConfigError("config: experiment.episode_repeats must be at least 1");
    }
    if (cfg.evo.threads < 1) {
        throw ConfigError("config: evolution.threads must be at least 1");
    }
    validate_evo_config(cfg.evo);
    validate_fitness_config(cfg.sim.fitness);
    validate_params(cfg.sim.robot);
    validate_schedule(cfg.sim.schedule);
    if (cfg.train_maze.starts.size() < static_cast<std::size_t>(cfg.evo.groups)) {
        throw ConfigError("config: training maze has fewer start poses than evolution.groups");
    }
}

} // namespace cpnc
