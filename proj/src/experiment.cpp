#include "cpnc/experiment.hpp"

#include "cpnc/error.hpp"
#include "cpnc/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace cpnc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string run_name(int i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "run_%03d", i);
    return buf;
}

// Settings that determine results. Thread count and output location are deliberately absent.
json effective_json(const ExperimentConfig& cfg)
{
    const EvoConfig& e = cfg.evo;
    const RobotParams& r = cfg.sim.robot;
    return {
        {"evolution",
         {{"mode", to_string(e.mode)},
          {"kind", to_string(e.kind)},
          {"pop_size", e.pop_size},
          {"groups", e.groups},
          {"group_size", e.group_size},
          {"phase1_gens", e.phase1_gens},
          {"phase2_gens", e.phase2_gens},
          {"p_cross_phase1", e.variation.p_cross_phase1},
          {"p_cross_phase2", e.variation.p_cross_phase2},
          {"eta_c", e.variation.eta_c},
          {"eta_m", e.variation.eta_m},
          {"p_mut", e.variation.p_mut},
          {"lamarckian", e.lamarckian},
          {"phase2_all_starts", e.phase2_all_starts}}},
        {"fitness", {{"max_step", cfg.sim.fitness.max_step}, {"hit_score", cfg.sim.fitness.hit_score}}},
        {"robot",
         {{"body_radius", r.body_radius},
          {"wheel_radius", r.wheel_radius},
          {"axle_length", r.axle_length},
          {"dt", r.dt},
          {"speed_limit", r.speed_limit},
          {"ir_range", r.ir_range},
          {"ir_half_span", r.ir_half_span},
          {"target_range", r.target_range},
          {"target_half_span", r.target_half_span},
          {"sensor_headings", r.sensor_headings}}},
        {"learning",
         {{"eta0", cfg.sim.schedule.eta0},
          {"eta_end", cfg.sim.schedule.eta_end},
          {"horizon", cfg.sim.schedule.horizon}}},
        {"experiment",
         {{"runs", cfg.runs}, {"seed", cfg.master_seed}, {"episode_repeats", cfg.episode_repeats}}},
    };
}

// Inverse of effective_json for the parts later commands need.
void read_effective(const json& eff, ExperimentConfig& cfg)
{
    const json& e = eff.at("evolution");
    cfg.evo.mode = parse_mode(e.at("mode").get<std::string>());
    cfg.evo.kind = parse_controller_kind(e.at("kind").get<std::string>());
    cfg.evo.pop_size = e.at("pop_size").get<int>();
    cfg.evo.groups = e.at("groups").get<int>();
    cfg.evo.group_size = e.at("group_size").get<int>();
    cfg.evo.phase1_gens = e.at("phase1_gens").get<int>();
    cfg.evo.phase2_gens = e.at("phase2_gens").get<int>();
    cfg.evo.variation.p_cross_phase1 = e.at("p_cross_phase1").get<double>();
    cfg.evo.variation.p_cross_phase2 = e.at("p_cross_phase2").get<double>();
    cfg.evo.variation.eta_c = e.at("eta_c").get<double>();
    cfg.evo.variation.eta_m = e.at("eta_m").get<double>();
    cfg.evo.variation.p_mut = e.at("p_mut").get<double>();
    cfg.evo.lamarckian = e.at("lamarckian").get<bool>();
    cfg.evo.phase2_all_starts = e.at("phase2_all_starts").get<bool>();

    const json& f = eff.at("fitness");
    cfg.sim.fitness.max_step = f.at("max_step").get<int>();
    cfg.sim.fitness.hit_score = f.at("hit_score").get<double>();

    const json& r = eff.at("robot");
    RobotParams& p = cfg.sim.robot;
    p.body_radius = r.at("body_radius").get<double>();
    p.wheel_radius = r.at("wheel_radius").get<double>();
    p.axle_length = r.at("axle_length").get<double>();
    p.dt = r.at("dt").get<double>();
    p.speed_limit = r.at("speed_limit").get<double>();
    p.ir_range = r.at("ir_range").get<double>();
    p.ir_half_span = r.at("ir_half_span").get<double>();
    p.target_range = r.at("target_range").get<double>();
    p.target_half_span = r.at("target_half_span").get<double>();
    p.sensor_headings = r.at("sensor_headings").get<std::array<double, kSensorSites>>();

    const json& l = eff.at("learning");
    cfg.sim.schedule.eta0 = l.at("eta0").get<double>();
    cfg.sim.schedule.eta_end = l.at("eta_end").get<double>();
    cfg.sim.schedule.horizon = l.at("horizon").get<int>();

    const json& x = eff.at("experiment");
    cfg.runs = x.at("runs").get<int>();
    cfg.master_seed = x.at("seed").get<std::uint64_t>();
    cfg.episode_repeats = x.at("episode_repeats").get<int>();
}

json batch_manifest(const std::string& command, const ExperimentConfig& cfg)
{
    return {{"command", command},
            {"config", cfg.text},
            {"effective", effective_json(cfg)},
            {"train_maze", json::parse(maze_to_json(cfg.train_maze))},
            {"test_maze", json::parse(maze_to_json(cfg.test_maze))}};
}

// Configuration recorded by a previous `train` batch.
ExperimentConfig load_batch(const fs::path& dir)
{
    const fs::path path = dir / "manifest.json";
    try {
        const json doc = json::parse(read_file(path));
        ExperimentConfig cfg;
        cfg.text = doc.at("config").get<std::string>();
        read_effective(doc.at("effective"), cfg);
        cfg.train_maze = parse_maze(doc.at("train_maze").dump());
        cfg.test_maze = parse_maze(doc.at("test_maze").dump());
        return cfg;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("manifest '" + path.string() + "': " + e.what());
    }
}

std::vector<fs::path> run_dirs(const fs::path& dir)
{
    std::vector<fs::path> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("run_", 0) == 0) {
            out.push_back(entry.path());
        }
    }
    if (ec) {
        throw IoError("cannot list '" + dir.string() + "': " + ec.message());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) {
        throw IoError("no run directories under '" + dir.string() + "'");
    }
    return out;
}

std::string path_csv(const EpisodeState& state)
{
    std::ostringstream out;
    write_path_csv(out, state);
    return out.str();
}

// Writes paths/<stem>.csv and render/<stem>.svg for one episode.
void write_episode(const fs::path& dir, const std::string& stem, const MazeSpec& maze, const EpisodeState& state)
{
    const std::string csv = path_csv(state);
    write_file(dir / "paths" / (stem + ".csv"), csv);
    std::istringstream in(csv);
    const auto rows = read_path_csv(in);
    write_file(dir / "render" / (stem + ".svg"), render_svg(maze, rows));
}

std::size_t best_by(const std::vector<Individual>& pop, std::span<const std::size_t> members, bool by_f1)
{
    std::size_t best = members.front();
    for (std::size_t i : members) {
        const double v = by_f1 ? pop[i].fitness.f1 : pop[i].fitness.f2;
        const double b = by_f1 ? pop[best].fitness.f1 : pop[best].fitness.f2;
        if (v > b) {
            best = i;
        }
    }
    return best;
}

std::string seconds_since(std::chrono::steady_clock::time_point t0)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs",
                  std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return buf;
}

void write_aggregates(const fs::path& dir, std::span<const std::vector<GenerationRow>> runs,
                      std::span<const std::string> series, const std::string& prefix = "")
{
    for (const auto& s : series) {
        write_file(dir / (prefix + s + ".csv"), boxplot_csv(aggregate_series(runs, s)));
    }
}

const std::vector<std::string> kTrainSeries = {"best_f1", "best_f2", "s_measure"};

} // namespace

void cmd_train(const ExperimentConfig& cfg, std::ostream& log)
{
    validate_config(cfg);
    const fs::path& out = cfg.out_dir;
    json manifest = batch_manifest("train", cfg);
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    std::vector<std::vector<GenerationRow>> tables;
    std::vector<FrontMember> candidates;
    for (int i = 0; i < cfg.runs; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        EvoConfig evo = cfg.evo;
        evo.seed = cfg.master_seed + static_cast<std::uint64_t>(i);
        const RunResult rr = run_evolution(evo, cfg.sim, cfg.train_maze);

        const fs::path dir = out / run_name(i);
        json run_manifest = manifest;
        run_manifest["run"] = i;
        run_manifest["seed"] = evo.seed;
        write_file(dir / "manifest.json", run_manifest.dump(2) + "\n");

        std::vector<GenerationRow> rows;
        for (const auto& g : rr.generations) {
            rows.push_back(to_row(g));
        }
        write_file(dir / "generations.csv", generations_csv(rows));

        StoredPopulation pop{evo.kind, evo.mode, {}};
        for (std::size_t k = 0; k < rr.final_population.size(); ++k) {
            const Individual& ind = rr.final_population[k];
            const bool front = std::find(rr.final_front.begin(), rr.final_front.end(), k) != rr.final_front.end();
            pop.members.push_back({k, ind.genome, ind.fitness, ind.rank, ind.reached, front});
            if (front) {
                candidates.push_back({i, k, ind.fitness, ind.genome});
            }
        }
        write_file(dir / "population.json", population_json(pop));

        // Frozen replays of the extreme front members from every training start.
        for (const bool by_f1 : {true, false}) {
            const std::size_t k = best_by(rr.final_population, rr.final_front, by_f1);
            for (std::size_t s = 0; s < cfg.train_maze.starts.size(); ++s) {
                const auto ep = run_episode(evo.kind, rr.final_population[k].genome, cfg.train_maze,
                                            cfg.train_maze.starts[s], EpisodeMode::Frozen, cfg.sim)
                                    .first;
                write_episode(dir, std::string(by_f1 ? "best_f1" : "best_f2") + "_start" + std::to_string(s),
                              cfg.train_maze, ep.trace);
            }
        }

        const GenerationRow last = rows.empty() ? GenerationRow{} : rows.back();
        char line[160];
        std::snprintf(line, sizeof line, "run %d/%d seed %llu: best_f1 %.3f best_f2 %.3f S %.3f front %zu", i + 1,
                      cfg.runs, static_cast<unsigned long long>(evo.seed), last.best_f1, last.best_f2,
                      last.s_measure, rr.final_front.size());
        log << line << " (" << seconds_since(t0) << ")\n" << std::flush;
        tables.push_back(std::move(rows));
    }

    write_aggregates(out / "aggregate", tables, kTrainSeries);
    json front = {{"kind", to_string(cfg.evo.kind)}, {"mode", to_string(cfg.evo.mode)}, {"members", json::array()}};
    for (const auto& m : accumulate_members(candidates)) {
        front["members"].push_back({{"run", m.run},
                                    {"index", m.index},
                                    {"fitness", {m.fitness.f1, m.fitness.f2}},
                                    {"genome", encode(m.genome)}});
    }
    write_file(out / "aggregate" / "front.json", front.dump(1) + "\n");
}

namespace {

std::vector<FrontMember> read_accumulated_front(const fs::path& train_dir)
{
    const fs::path path = train_dir / "aggregate" / "front.json";
    try {
        const json doc = json::parse(read_file(path));
        std::vector<FrontMember> out;
        for (const auto& m : doc.at("members")) {
            const auto fit = m.at("fitness").get<std::vector<double>>();
            if (fit.size() != 2) {
                throw ParseError("fitness must hold two values");
            }
            out.push_back({m.at("run").get<int>(), m.at("index").get<std::size_t>(), {fit[0], fit[1]},
                           decode(m.at("genome").get<std::vector<double>>())});
        }
        return out;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError("front '" + path.string() + "': " + e.what());
    }
}

json episode_json(const ControllerResult& c)
{
    return {{"id", c.id},
            {"run", c.run},
            {"index", c.index},
            {"tags", c.tags},
            {"training_fitness", {c.training_fitness.f1, c.training_fitness.f2}},
            {"reached", c.reached},
            {"episode", json::parse(episode_summary_json(c.episode))},
            {"path", "paths/" + c.id + ".csv"}};
}

} // namespace

const TagSummary& GeneralizationReport::tag(const std::string& name) const
{
    for (const auto& s : summary) {
        if (s.tag == name) {
            return s;
        }
    }
    throw std::out_of_range("no summary for tag '" + name + "'");
}

GeneralizationReport cmd_generalize(const fs::path& train_dir, const GeneralizeOptions& opt, std::ostream& log)
{
    ExperimentConfig cfg = load_batch(train_dir);
    if (opt.test_maze) {
        cfg.test_maze = load_maze(*opt.test_maze);
    }
    if (opt.episode_repeats) {
        if (*opt.episode_repeats < 1) {
            throw ConfigError("generalize: episode repeats must be at least 1");
        }
        cfg.episode_repeats = *opt.episode_repeats;
    }
    const fs::path out = opt.out.value_or(train_dir / "generalize");

    SimulationConfig sim = cfg.sim;
    sim.fitness.max_step = cfg.sim.fitness.max_step * cfg.episode_repeats;
    const Pose start = cfg.test_maze.starts.front();

    GeneralizationReport report;
    report.kind = cfg.evo.kind;
    report.mode = cfg.evo.mode;
    report.episode_steps = sim.fitness.max_step;

    auto test = [&](ControllerResult c, const Genome& g) {
        c.episode = run_episode(report.kind, g, cfg.test_maze, start, EpisodeMode::Frozen, sim).first;
        c.reached = c.episode.first_hit_step.has_value();
        write_episode(out, c.id, cfg.test_maze, c.episode.trace);
        report.controllers.push_back(std::move(c));
    };

    for (const auto& dir : run_dirs(train_dir)) {
        const json run_manifest = json::parse(read_file(dir / "manifest.json"));
        const int run = run_manifest.at("run").get<int>();
        const StoredPopulation pop = parse_population_json(read_file(dir / "population.json"));
        std::vector<const StoredController*> front;
        for (const auto& m : pop.members) {
            if (m.front) {
                front.push_back(&m);
            }
        }
        if (front.empty()) {
            throw ParseError("population in '" + dir.string() + "' has no front members");
        }
        const StoredController* best_f1 = front.front();
        const StoredController* best_f2 = front.front();
        for (const auto* m : front) {
            best_f1 = m->fitness.f1 > best_f1->fitness.f1 ? m : best_f1;
            best_f2 = m->fitness.f2 > best_f2->fitness.f2 ? m : best_f2;
        }
        for (const auto* m : front) {
            ControllerResult c;
            c.id = run_name(run) + "_" + std::to_string(m->index);
            c.run = run;
            c.index = m->index;
            c.training_fitness = m->fitness;
            if (m == best_f1) {
                c.tags.push_back("best_f1");
            }
            if (m == best_f2) {
                c.tags.push_back("best_f2");
            }
            test(std::move(c), m->genome);
        }
    }
    const auto acc = read_accumulated_front(train_dir);
    for (std::size_t k = 0; k < acc.size(); ++k) {
        ControllerResult c;
        c.id = "accumulated_" + std::to_string(k);
        c.index = k;
        c.training_fitness = acc[k].fitness;
        c.tags.push_back("accumulated");
        test(std::move(c), acc[k].genome);
    }

    for (const std::string name : {"all", "best_f1", "best_f2", "accumulated"}) {
        TagSummary s{name, 0, 0};
        for (const auto& c : report.controllers) {
            const bool member = name == "all" ? c.run >= 0
                                              : std::find(c.tags.begin(), c.tags.end(), name) != c.tags.end();
            if (member) {
                ++s.tested;
                s.reached += c.reached ? 1 : 0;
            }
        }
        report.summary.push_back(s);
    }

    json doc = {{"kind", to_string(report.kind)},
                {"mode", to_string(report.mode)},
                {"episode_steps", report.episode_steps},
                {"test_maze", json::parse(maze_to_json(cfg.test_maze))},
                {"controllers", json::array()},
                {"summary", json::object()}};
    for (const auto& c : report.controllers) {
        doc["controllers"].push_back(episode_json(c));
    }
    for (const auto& s : report.summary) {
        doc["summary"][s.tag] = {{"tested", s.tested},
                                 {"reached", s.reached},
                                 {"fraction", s.tested > 0 ? static_cast<double>(s.reached) / s.tested : 0.0}};
        log << to_string(report.kind) << ' ' << to_string(report.mode) << ' ' << s.tag << ": " << s.reached << '/'
            << s.tested << " reached the test target\n";
    }
    write_file(out / "report.json", doc.dump(2) + "\n");
    return report;
}

AdaptReport cmd_adapt(const ExperimentConfig& cfg, const fs::path& pretrained_dir, std::ostream& log)
{
    validate_config(cfg);
    const ExperimentConfig source = load_batch(pretrained_dir);
    if (source.evo.kind != cfg.evo.kind) {
        throw ConfigError("adapt: pretrained controllers are " + to_string(source.evo.kind) + " but the config asks for " +
                          to_string(cfg.evo.kind));
    }
    const auto acc = read_accumulated_front(pretrained_dir);
    if (acc.empty()) {
        throw ConfigError("adapt: accumulated front of '" + pretrained_dir.string() + "' is empty");
    }
    std::vector<Genome> seeded;
    for (int i = 0; i < cfg.evo.pop_size; ++i) {
        seeded.push_back(acc[static_cast<std::size_t>(i) % acc.size()].genome);
    }

    EvoConfig evo = cfg.evo;
    evo.groups = 1;
    evo.group_size = evo.pop_size;
    MazeSpec maze = cfg.test_maze;
    maze.starts.resize(1);

    const fs::path& out = cfg.out_dir;
    json manifest = batch_manifest("adapt", cfg);
    manifest["pretrained_front_size"] = acc.size();
    write_file(out / "manifest.json", manifest.dump(2) + "\n");

    AdaptReport report;
    report.phase1_gens = evo.phase1_gens;
    std::vector<std::vector<GenerationRow>> arms[2];
    const char* names[2] = {"pretrained", "random"};
    for (int i = 0; i < cfg.runs; ++i) {
        evo.seed = cfg.master_seed + static_cast<std::uint64_t>(i);
        for (int a = 0; a < 2; ++a) {
            const auto t0 = std::chrono::steady_clock::now();
            const RunResult rr =
                a == 0 ? run_evolution(evo, cfg.sim, maze, seeded) : run_evolution(evo, cfg.sim, maze);
            std::vector<GenerationRow> rows;
            for (const auto& g : rr.generations) {
                rows.push_back(to_row(g));
            }
            const fs::path dir = out / names[a] / run_name(i);
            write_file(dir / "generations.csv", generations_csv(rows));
            const GenerationRow last = rows.empty() ? GenerationRow{} : rows.back();
            char line[160];
            std::snprintf(line, sizeof line, "%s run %d/%d seed %llu: best_f1 %.3f reached %.3f", names[a], i + 1,
                          cfg.runs, static_cast<unsigned long long>(evo.seed), last.best_f1, last.reached_fraction);
            log << line << " (" << seconds_since(t0) << ")\n" << std::flush;
            arms[a].push_back(std::move(rows));
        }
    }

    std::string reached = "gen,phase,pretrained,random\n";
    const auto& ref = arms[0].front();
    for (std::size_t k = 0; k < ref.size(); ++k) {
        double mean[2] = {0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            for (const auto& run : arms[a]) {
                mean[a] += run[k].reached_fraction;
            }
            mean[a] /= static_cast<double>(arms[a].size());
        }
        report.gens.push_back(ref[k].gen);
        report.pretrained_reached.push_back(mean[0]);
        report.random_reached.push_back(mean[1]);
        reached += std::to_string(ref[k].gen) + ',' + (ref[k].gen <= evo.phase1_gens ? "1" : "2") + ',' +
                   format_double(mean[0]) + ',' + format_double(mean[1]) + '\n';
    }
    write_file(out / "aggregate" / "reached.csv", reached);
    const std::vector<std::string> series = {"best_f1", "median_f1", "reached_fraction"};
    for (int a = 0; a < 2; ++a) {
        write_aggregates(out / "aggregate", arms[a], series, std::string(names[a]) + "_");
    }
    return report;
}

std::vector<Comparison> cmd_stats(std::span<const fs::path> sets, const fs::path& out, std::ostream& log)
{
    if (sets.size() < 2) {
        throw ConfigError("stats: at least two run sets are required");
    }
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<GenerationRow>>> tables;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        std::string label = sets[i].filename().string();
        if (label.empty() || label == ".") {
            label = sets[i].parent_path().filename().string();
        }
        if (label.empty() || std::find(labels.begin(), labels.end(), label) != labels.end()) {
            label = "set" + std::to_string(i);
        }
        labels.push_back(label);
        std::vector<std::vector<GenerationRow>> runs;
        for (const auto& dir : run_dirs(sets[i])) {
            runs.push_back(parse_generations_csv(read_file(dir / "generations.csv")));
        }
        write_aggregates(out / label, runs, kTrainSeries);
        tables.push_back(std::move(runs));
    }

    std::vector<Comparison> result;
    json doc = {{"sets", json::array()}, {"comparisons", json::array()}};
    for (std::size_t i = 0; i < sets.size(); ++i) {
        doc["sets"].push_back({{"label", labels[i]}, {"runs", tables[i].size()}});
    }
    auto finals = [](const std::vector<std::vector<GenerationRow>>& runs, const std::string& series) {
        std::vector<double> v;
        for (const auto& run : runs) {
            if (run.empty()) {
                throw ParseError("stats: empty generations table");
            }
            v.push_back(series_value(run.back(), series));
        }
        return v;
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return quantile_sorted(v, 0.5);
    };
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            for (const auto& series : kTrainSeries) {
                const auto a = finals(tables[i], series);
                const auto b = finals(tables[j], series);
                Comparison c{labels[i], labels[j], series, tables[i].front().back().gen, median(a), median(b),
                             rank_sum_test(a, b)};
                doc["comparisons"].push_back({{"a", c.a},
                                              {"b", c.b},
                                              {"series", c.series},
                                              {"gen", c.gen},
                                              {"n_a", a.size()},
                                              {"n_b", b.size()},
                                              {"median_a", c.median_a},
                                              {"median_b", c.median_b},
                                              {"u", c.test.statistic},
                                              {"z", c.test.z},
                                              {"p_value", c.test.p_value},
                                              {"exact", c.test.exact}});
                char line[200];
                std::snprintf(line, sizeof line, "%s vs %s %s: median %.4g vs %.4g, p = %.4g%s", c.a.c_str(),
                              c.b.c_str(), series.c_str(), c.median_a, c.median_b, c.test.p_value,
                              c.test.exact ? " (exact)" : "");
                log << line << '\n';
                result.push_back(std::move(c));
            }
        }
    }
    write_file(out / "stats.json", doc.dump(2) + "\n");
    return result;
}

} // namespace cpnc
