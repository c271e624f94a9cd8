#pragma once

#include "cpnc/fitness.hpp"
#include "cpnc/genome.hpp"
#include "cpnc/random.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpnc {

/// MOOP optimizes both objectives; the SOOP modes hold the other objective at zero.
enum class Mode { SOOP_F1, SOOP_F2, MOOP };

std::string to_string(Mode mode);
/// Accepts "MOOP", "SOOP_F1", "SOOP_F2" (case-insensitive, '-' allowed for '_').
Mode parse_mode(const std::string& text);

/// Max-max Pareto dominance.
bool dominates(const FitnessVector& a, const FitnessVector& b);

FitnessVector soop_mask(const FitnessVector& f, Mode mode);

struct Individual {
    Genome genome;
    FitnessVector fitness; // raw objectives
    FitnessVector masked;  // what selection sees
    int rank = 0;
    double crowding = 0.0;
    bool reached = false;
};

using Fronts = std::vector<std::vector<std::size_t>>;

/// Deb's fast nondominated sort. Indices within a front keep input order.
Fronts fast_nondominated_sort(std::span<const FitnessVector> points);

/// Crowding distance of each member of one front (same order as the input).
/// Boundary points of every objective get +inf; an objective with zero range adds nothing else.
std::vector<double> crowding_distance(std::span<const FitnessVector> front);

/// Writes rank and crowding into `pop` from its masked fitness.
void assign_rank_and_crowding(std::vector<Individual>& pop);

/// Binary tournament between candidates i and j: lower rank, then larger crowding, then i.
std::size_t tournament_winner(std::span<const Individual> pop, std::size_t i, std::size_t j);
std::size_t tournament_select(std::span<const Individual> pop, Rng& rng);

/// Elitist truncation: keeps the best `n` of `pool` by (rank, crowding), ties by pool order.
/// Survivors carry the rank/crowding computed on the pool.
std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t n);

} // namespace cpnc
