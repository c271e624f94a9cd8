#pragma once

#include "cpnc/genome.hpp"
#include "cpnc/random.hpp"

#include <array>
#include <cstddef>
#include <utility>

namespace cpnc {

/// Variation parameters shared by both phases.
struct VariationConfig {
    double p_cross_phase1 = 1.0;
    double p_cross_phase2 = 0.5;
    double eta_c = 10.0;     // SBX distribution index
    double eta_m = 20.0;     // polynomial mutation index
    double p_mut = 1.0 / 18; // per-gene mutation probability

    friend bool operator==(const VariationConfig&, const VariationConfig&) = default;
};

/// SBX spread factor for a uniform draw u in [0,1). u = 0.5 gives beta = 1.
double sbx_spread(double u, double eta_c);

/// Children for a given spread, before clipping; their mean equals the parents' mean.
std::pair<double, double> sbx_children(double x1, double x2, double beta);

/// Simulated binary crossover of one gene; children clipped to [lo, hi].
std::pair<double, double> sbx(double x1, double x2, double eta_c, double lo, double hi, Rng& rng);

/// Bounded polynomial perturbation for a uniform draw u in [0,1).
double polynomial_perturb(double x, double u, double eta_m, double lo, double hi);

/// With probability p_mut applies polynomial_perturb; the result stays in [lo, hi].
double polynomial_mutation(double x, double eta_m, double lo, double hi, double p_mut, Rng& rng);

using NeuronMatch = std::array<std::size_t, kNeurons>;

/// Greedy neuron matching without replacement: for a's neurons in index order, the
/// nearest not-yet-matched Kohonen prototype of b (lowest index on ties).
NeuronMatch match_neurons(const Genome& a, const Genome& b);

/// Mutates every Grossberg gene and the slope of `g` independently with p_mut.
void mutate_output_side(Genome& g, const VariationConfig& cfg, Rng& rng);

/// Phase-1 recombination. CPNC: Kohonen layers copied from each parent, Grossberg genes and
/// slope SBX-crossed (with probability p_cross_phase1) then mutated. FFNC: all genes crossed and mutated.
std::pair<Genome, Genome> crossover_phase1(const Genome& p1, const Genome& p2, ControllerKind kind,
                                           const VariationConfig& cfg, Rng& rng);

/// Phase-2 recombination. CPNC: neurons paired by match_neurons; each pair is crossed with
/// probability p_cross_phase2, SBX over both its Kohonen and Grossberg genes; slope crossed with
/// the same probability; mutation on Grossberg genes and slope only. FFNC: as phase 1.
std::pair<Genome, Genome> crossover_phase2(const Genome& p1, const Genome& p2, ControllerKind kind,
                                           const VariationConfig& cfg, Rng& rng);

} // namespace cpnc
