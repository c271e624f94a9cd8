#pragma once

#include "cpnc/fitness.hpp"

#include <span>
#include <vector>

namespace cpnc {

/// Max-max front: mutually nondominated, all components >= 0.
using Front = std::vector<FitnessVector>;

/// Area of the union of [0,f1]x[0,f2] over the points (hypervolume w.r.t. the origin).
/// Dominated points may be present and contribute nothing. Throws std::invalid_argument
/// on a negative component.
double s_measure(std::span<const FitnessVector> points);

/// Indices of the nondominated members of `points`; duplicates keep their first occurrence.
std::vector<std::size_t> nondominated_indices(std::span<const FitnessVector> points);

/// Nondominated subset of the union of `fronts`, duplicates collapsed, sorted by f1 ascending.
Front accumulate_front(std::span<const Front> fronts);

struct BoxStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double whisker_lo = 0.0;
    double whisker_hi = 0.0;
    std::vector<double> outliers; // ascending
};

/// Inclusive linear-interpolation quantile of sorted data, p in [0,1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Quartiles by inclusive linear interpolation; whiskers are the extreme data within
/// 1.5 IQR of the nearer quartile. Throws std::invalid_argument on empty input.
BoxStats boxplot_stats(std::span<const double> values);

/// Fraction of entries that are true. Throws std::invalid_argument on empty input.
double reached_fraction(std::span<const bool> reached);
double reached_fraction(std::span<const EpisodeResult> results);

struct RankSumResult {
    double statistic = 0.0; // Mann-Whitney U of the first sample
    double z = 0.0;         // normal score (0 when the exact distribution was used)
    double p_value = 1.0;   // two-sided
    bool exact = false;
};

/// Two-sided Wilcoxon rank-sum test. Exact enumeration of the rank-sum distribution when
/// both samples are smaller than 20; otherwise the normal approximation with tie and
/// continuity correction. Throws std::invalid_argument if a sample is empty.
RankSumResult rank_sum_test(std::span<const double> a, std::span<const double> b);

} // namespace cpnc
