#include "cpnc/metrics.hpp"

#include "cpnc/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cpnc {

double s_measure(std::span<const FitnessVector> points)
{
    std::vector<FitnessVector> sorted(points.begin(), points.end());
    for (const auto& p : sorted) {
        if (p.f1 < 0.0 || p.f2 < 0.0) {
            throw std::invalid_argument("s_measure: negative objective value");
        }
    }
    // Sweep from the largest f1 down; each point adds the strip it raises above the running f2 maximum.
    std::sort(sorted.begin(), sorted.end(), [](const FitnessVector& a, const FitnessVector& b) {
        return a.f1 != b.f1 ? a.f1 > b.f1 : a.f2 > b.f2;
    });
    double area = 0.0;
    double top = 0.0;
    for (const auto& p : sorted) {
        if (p.f2 > top) {
            area += p.f1 * (p.f2 - top);
            top = p.f2;
        }
    }
    return area;
}

std::vector<std::size_t> nondominated_indices(std::span<const FitnessVector> points)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (dominates(points[j], points[i]) || (j < i && points[j] == points[i])) {
                keep = false;
            }
        }
        if (keep) {
            out.push_back(i);
        }
    }
    return out;
}

Front accumulate_front(std::span<const Front> fronts)
{
    std::vector<FitnessVector> all;
    for (const auto& f : fronts) {
        all.insert(all.end(), f.begin(), f.end());
    }
    Front out;
    for (std::size_t idx : nondominated_indices(all)) {
        out.push_back(all[idx]);
    }
    std::sort(out.begin(), out.end(), [](const FitnessVector& a, const FitnessVector& b) {
        return a.f1 != b.f1 ? a.f1 < b.f1 : a.f2 < b.f2;
    });
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p)
{
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats boxplot_stats(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("boxplot_stats: empty input");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());

    BoxStats b;
    b.min = v.front();
    b.max = v.back();
    b.q1 = quantile_sorted(v, 0.25);
    b.median = quantile_sorted(v, 0.5);
    b.q3 = quantile_sorted(v, 0.75);
    b.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());

    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = *std::find_if(v.begin(), v.end(), [&](double x) { return x >= lo_fence; });
    b.whisker_hi = *std::find_if(v.rbegin(), v.rend(), [&](double x) { return x <= hi_fence; });
    b.whisker_lo = std::min(b.whisker_lo, b.q1);
    b.whisker_hi = std::max(b.whisker_hi, b.q3);
    for (double x : v) {
        if (x < b.whisker_lo || x > b.whisker_hi) {
            b.outliers.push_back(x);
        }
    }
    return b;
}

double reached_fraction(std::span<const bool> reached)
{
    if (reached.empty()) {
        throw std::invalid_argument("reached_fraction: empty input");
    }
    const auto hits = std::count(reached.begin(), reached.end(), true);
    return static_cast<double>(hits) / static_cast<double>(reached.size());
}

double reached_fraction(std::span<const EpisodeResult> results)
{
    if (results.empty()) {
        throw std::invalid_argument("reached_fraction: empty input");
    }
    const auto hits =
        std::count_if(results.begin(), results.end(), [](const EpisodeResult& r) { return r.first_hit_step.has_value(); });
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

namespace {

// Midranks of the pooled sample, doubled so they are integers.
std::vector<long> doubled_midranks(const std::vector<double>& pooled, double& tie_term)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<long> ranks(n);
    tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) {
            ++j;
        }
        // Positions i..j (0-based) share rank ((i+1)+(j+1))/2.
        const long doubled = static_cast<long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = doubled;
        }
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    return ranks;
}

} // namespace

RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("rank_sum_test: empty sample");
    }
    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());

    double tie_term = 0.0;
    const auto ranks = doubled_midranks(pooled, tie_term);
    long w2 = 0; // doubled rank sum of the first sample
    for (std::size_t i = 0; i < n1; ++i) {
        w2 += ranks[i];
    }

    RankSumResult r;
    r.statistic = static_cast<double>(w2) / 2.0 - static_cast<double>(n1 * (n1 + 1)) / 2.0;

    if (std::max(n1, n2) < 20) {
        // ways[k][s]: number of k-subsets of the pooled ranks with doubled sum s.
        const long total = std::accumulate(ranks.begin(), ranks.end(), 0L);
        std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
        ways[0][0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto rk = static_cast<std::size_t>(ranks[i]);
            for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
                for (std::size_t s = static_cast<std::size_t>(total); s >= rk; --s) {
                    ways[k][s] += ways[k - 1][s - rk];
                }
            }
        }
        double all = 0.0;
        double le = 0.0;
        double ge = 0.0;
        for (std::size_t s = 0; s <= static_cast<std::size_t>(total); ++s) {
            const double c = ways[n1][s];
            all += c;
            if (static_cast<long>(s) <= w2) {
                le += c;
            }
            if (static_cast<long>(s) >= w2) {
                ge += c;
            }
        }
        r.exact = true;
        r.p_value = std::min(1.0, 2.0 * std::min(le, ge) / all);
        return r;
    }

    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    const double dn = static_cast<double>(n);
    const double mean = dn1 * dn2 / 2.0;
    const double var = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double dev = std::max(0.0, std::abs(r.statistic - mean) - 0.5);
    r.z = (r.statistic - mean >= 0 ? 1.0 : -1.0) * dev / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(dev / std::sqrt(var) / std::sqrt(2.0)));
    return r;
}

} // namespace cpnc
