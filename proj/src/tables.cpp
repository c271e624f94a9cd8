#include "cpnc/error.hpp"
#include "cpnc/experiment.hpp"
#include "cpnc/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cpnc {

using nlohmann::json;

namespace {

double parse_number(const std::string& field, const char* what)
{
    double v = 0.0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(std::string(what) + ": bad number '" + field + "'");
    }
    return v;
}

int parse_int(const std::string& field, const char* what)
{
    int v = 0;
    const char* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(std::string(what) + ": bad integer '" + field + "'");
    }
    return v;
}

constexpr const char* kGenerationsHeader = "gen,best_f1,median_f1,best_f2,median_f2,s_measure,reached_fraction";

} // namespace

GenerationRow to_row(const GenerationStats& st)
{
    return {st.gen, st.best_f1, st.median_f1, st.best_f2, st.median_f2, st.s_measure, st.reached_fraction};
}

std::string generations_csv(std::span<const GenerationRow> rows)
{
    std::string out = std::string(kGenerationsHeader) + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.gen);
        for (double v : {r.best_f1, r.median_f1, r.best_f2, r.median_f2, r.s_measure, r.reached_fraction}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::vector<GenerationRow> parse_generations_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kGenerationsHeader) {
        throw ParseError("generations table: unexpected header");
    }
    std::vector<GenerationRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 7) {
            throw ParseError("generations table: expected 7 fields: " + line);
        }
        GenerationRow r;
        r.gen = parse_int(f[0], "generations table");
        r.best_f1 = parse_number(f[1], "generations table");
        r.median_f1 = parse_number(f[2], "generations table");
        r.best_f2 = parse_number(f[3], "generations table");
        r.median_f2 = parse_number(f[4], "generations table");
        r.s_measure = parse_number(f[5], "generations table");
        r.reached_fraction = parse_number(f[6], "generations table");
        rows.push_back(r);
    }
    return rows;
}

double series_value(const GenerationRow& row, const std::string& series)
{
    if (series == "best_f1") {
        return row.best_f1;
    }
    if (series == "median_f1") {
        return row.median_f1;
    }
    if (series == "best_f2") {
        return row.best_f2;
    }
    if (series == "median_f2") {
        return row.median_f2;
    }
    if (series == "s_measure") {
        return row.s_measure;
    }
    if (series == "reached_fraction") {
        return row.reached_fraction;
    }
    throw std::invalid_argument("unknown series '" + series + "'");
}

std::vector<int> sampled_generations(int last)
{
    std::vector<int> gens;
    for (int g = 10; g <= last; g += 10) {
        gens.push_back(g);
    }
    if (last > 0 && last % 10 != 0) {
        gens.push_back(last);
    }
    return gens;
}

std::vector<BoxRow> aggregate_series(std::span<const std::vector<GenerationRow>> runs, const std::string& series)
{
    if (runs.empty()) {
        throw std::invalid_argument("aggregate_series: no runs");
    }
    for (const auto& run : runs) {
        if (run.size() != runs.front().size()) {
            throw std::invalid_argument("aggregate_series: runs differ in length");
        }
        for (std::size_t k = 0; k < run.size(); ++k) {
            if (run[k].gen != runs.front()[k].gen) {
                throw std::invalid_argument("aggregate_series: runs differ in generation numbering");
            }
        }
    }
    const auto& first = runs.front();
    std::vector<BoxRow> rows;
    if (first.empty()) {
        return rows;
    }
    for (int gen : sampled_generations(first.back().gen)) {
        const auto it = std::find_if(first.begin(), first.end(), [&](const GenerationRow& r) { return r.gen == gen; });
        if (it == first.end()) {
            continue;
        }
        const auto k = static_cast<std::size_t>(it - first.begin());
        std::vector<double> values;
        for (const auto& run : runs) {
            values.push_back(series_value(run[k], series));
        }
        rows.push_back({series, gen, boxplot_stats(values)});
    }
    return rows;
}

std::string boxplot_csv(std::span<const BoxRow> rows)
{
    std::string out = "series,gen,min,whisker_lo,q1,median,mean,q3,whisker_hi,max,outliers\n";
    for (const auto& r : rows) {
        const BoxStats& b = r.box;
        out += r.series + ',' + std::to_string(r.gen);
        for (double v : {b.min, b.whisker_lo, b.q1, b.median, b.mean, b.q3, b.whisker_hi, b.max}) {
            out += ',';
            out += format_double(v);
        }
        for (double v : b.outliers) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string population_json(const StoredPopulation& pop)
{
    json doc;
    doc["kind"] = to_string(pop.kind);
    doc["mode"] = to_string(pop.mode);
    json members = json::array();
    for (const auto& m : pop.members) {
        members.push_back({{"index", m.index},
                           {"fitness", {m.fitness.f1, m.fitness.f2}},
                           {"rank", m.rank},
                           {"reached", m.reached},
                           {"front", m.front},
                           {"genome", encode(m.genome)}});
    }
    doc["individuals"] = std::move(members);
    return doc.dump(1) + "\n";
}

StoredPopulation parse_population_json(const std::string& text)
{
    try {
        const json doc = json::parse(text);
        StoredPopulation pop;
        pop.kind = parse_controller_kind(doc.at("kind").get<std::string>());
        pop.mode = parse_mode(doc.at("mode").get<std::string>());
        for (const auto& m : doc.at("individuals")) {
            StoredController c;
            c.index = m.at("index").get<std::size_t>();
            const auto fit = m.at("fitness").get<std::vector<double>>();
            if (fit.size() != 2) {
                throw ParseError("population: fitness must hold two values");
            }
            c.fitness = {fit[0], fit[1]};
            c.rank = m.at("rank").get<int>();
            c.reached = m.at("reached").get<bool>();
            c.front = m.at("front").get<bool>();
            c.genome = decode(m.at("genome").get<std::vector<double>>());
            pop.members.push_back(std::move(c));
        }
        return pop;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("population: ") + e.what());
    }
}

std::vector<FrontMember> accumulate_members(std::span<const FrontMember> candidates)
{
    std::vector<FitnessVector> points;
    for (const auto& c : candidates) {
        points.push_back(c.fitness);
    }
    std::vector<FrontMember> out;
    for (std::size_t i : nondominated_indices(points)) {
        out.push_back(candidates[i]);
    }
    std::stable_sort(out.begin(), out.end(), [](const FrontMember& a, const FrontMember& b) {
        return a.fitness.f1 != b.fitness.f1 ? a.fitness.f1 < b.fitness.f1 : a.fitness.f2 < b.fitness.f2;
    });
    return out;
}

namespace {

constexpr double kScale = 10.0; // px per cm
constexpr double kMargin = 2.0; // cm

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

std::string render_svg(const MazeSpec& maze, std::span<const TraceRow> path)
{
    const Bounds& b = maze.bounds;
    const double w = b.xmax - b.xmin + 2 * kMargin;
    const double h = b.ymax - b.ymin + 2 * kMargin;
    auto px = [&](double x) { return fmt((x - b.xmin + kMargin) * kScale); };
    auto py = [&](double y) { return fmt((b.ymax - y + kMargin) * kScale); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w * kScale) << "\" height=\""
        << fmt(h * kScale) << "\" viewBox=\"0 0 " << fmt(w * kScale) << ' ' << fmt(h * kScale) << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<g stroke=\"black\" stroke-width=\"4\" stroke-linecap=\"round\">\n";
    for (const auto& s : maze.walls) {
        out << "<line x1=\"" << px(s.a.x) << "\" y1=\"" << py(s.a.y) << "\" x2=\"" << px(s.b.x) << "\" y2=\""
            << py(s.b.y) << "\"/>\n";
    }
    out << "</g>\n<g fill=\"#d62728\">\n";
    for (const auto& t : maze.targets) {
        out << "<circle cx=\"" << px(t.x) << "\" cy=\"" << py(t.y) << "\" r=\"8\"/>\n";
    }
    out << "</g>\n";
    if (!path.empty()) {
        out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"3\" points=\"";
        for (std::size_t k = 0; k < path.size(); ++k) {
            out << (k == 0 ? "" : " ") << px(path[k].pose.position.x) << ',' << py(path[k].pose.position.y);
        }
        out << "\"/>\n";
        const Point2 s = path.front().pose.position;
        out << "<circle cx=\"" << px(s.x) << "\" cy=\"" << py(s.y) << "\" r=\"" << fmt(2.75 * kScale)
            << "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"4\"/>\n";
        for (const auto& row : path) {
            const Point2 p = row.pose.position;
            if (row.event.find("hit:") != std::string::npos) {
                out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y)
                    << "\" r=\"14\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"3\"/>\n";
            }
            if (row.event.find("collision") != std::string::npos) {
                const double d = 1.5;
                out << "<path d=\"M" << px(p.x - d) << ',' << py(p.y - d) << " L" << px(p.x + d) << ','
                    << py(p.y + d) << " M" << px(p.x - d) << ',' << py(p.y + d) << " L" << px(p.x + d) << ','
                    << py(p.y - d) << "\" stroke=\"#d62728\" stroke-width=\"4\"/>\n";
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

} // namespace cpnc
