#include "cpnc/nsga2.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cpnc {

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::SOOP_F1:
        return "SOOP_F1";
    case Mode::SOOP_F2:
        return "SOOP_F2";
    case Mode::MOOP:
        return "MOOP";
    }
    return "MOOP";
}

Mode parse_mode(const std::string& text)
{
    std::string t;
    for (unsigned char c : text) {
        t.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(c)));
    }
    if (t == "MOOP") {
        return Mode::MOOP;
    }
    if (t == "SOOP_F1") {
        return Mode::SOOP_F1;
    }
    if (t == "SOOP_F2") {
        return Mode::SOOP_F2;
    }
    throw std::invalid_argument("unknown mode '" + text + "'");
}

bool dominates(const FitnessVector& a, const FitnessVector& b)
{
    return a.f1 >= b.f1 && a.f2 >= b.f2 && (a.f1 > b.f1 || a.f2 > b.f2);
}

FitnessVector soop_mask(const FitnessVector& f, Mode mode)
{
    switch (mode) {
    case Mode::SOOP_F1:
        return {f.f1, 0.0};
    case Mode::SOOP_F2:
        return {0.0, f.f2};
    case Mode::MOOP:
        break;
    }
    return f;
}

Fronts fast_nondominated_sort(std::span<const FitnessVector> points)
{
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> domination_count(n, 0);
    Fronts fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated_by[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t p : current) {
            for (std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const FitnessVector> front)
{
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) {
        return dist;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);
    for (auto objective : {&FitnessVector::f1, &FitnessVector::f2}) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a].*objective < front[b].*objective; });
        dist[order.front()] = inf;
        dist[order.back()] = inf;
        const double range = front[order.back()].*objective - front[order.front()].*objective;
        if (range <= 0.0) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[order[k]] += (front[order[k + 1]].*objective - front[order[k - 1]].*objective) / range;
        }
    }
    return dist;
}

void assign_rank_and_crowding(std::vector<Individual>& pop)
{
    std::vector<FitnessVector> pts;
    pts.reserve(pop.size());
    for (const auto& ind : pop) {
        pts.push_back(ind.masked);
    }
    const Fronts fronts = fast_nondominated_sort(pts);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        std::vector<FitnessVector> members;
        members.reserve(fronts[r].size());
        for (std::size_t idx : fronts[r]) {
            members.push_back(pts[idx]);
        }
        const auto cd = crowding_distance(members);
        for (std::size_t k = 0; k < fronts[r].size(); ++k) {
            pop[fronts[r][k]].rank = static_cast<int>(r);
            pop[fronts[r][k]].crowding = cd[k];
        }
    }
}

std::size_t tournament_winner(std::span<const Individual> pop, std::size_t i, std::size_t j)
{
    if (pop[j].rank < pop[i].rank) {
        return j;
    }
    if (pop[j].rank == pop[i].rank && pop[j].crowding > pop[i].crowding) {
        return j;
    }
    return i;
}

std::size_t tournament_select(std::span<const Individual> pop, Rng& rng)
{
    const std::size_t i = rng.index(pop.size());
    const std::size_t j = rng.index(pop.size());
    return tournament_winner(pop, i, j);
}

std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t n)
{
    assign_rank_and_crowding(pool);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pool[a].rank != pool[b].rank) {
            return pool[a].rank < pool[b].rank;
        }
        return pool[a].crowding > pool[b].crowding;
    });
    order.resize(std::min(n, order.size()));
    std::vector<Individual> out;
    out.reserve(order.size());
    for (std::size_t idx : order) {
        out.push_back(std::move(pool[idx]));
    }
    return out;
}

} // namespace cpnc
