#include "cpnc/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace cpnc {

double sbx_spread(double u, double eta_c)
{
    const double exponent = 1.0 / (eta_c + 1.0);
    if (u <= 0.5) {
        return std::pow(2.0 * u, exponent);
    }
    return std::pow(1.0 / (2.0 * (1.0 - u)), exponent);
}

std::pair<double, double> sbx_children(double x1, double x2, double beta)
{
    if (x1 == x2) {
        return {x1, x2};
    }
    return {0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2), 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)};
}

std::pair<double, double> sbx(double x1, double x2, double eta_c, double lo, double hi, Rng& rng)
{
    const double beta = sbx_spread(rng.uniform(), eta_c);
    auto [c1, c2] = sbx_children(x1, x2, beta);
    return {std::clamp(c1, lo, hi), std::clamp(c2, lo, hi)};
}

double polynomial_perturb(double x, double u, double eta_m, double lo, double hi)
{
    const double span = hi - lo;
    if (span <= 0.0) {
        return x;
    }
    const double power = 1.0 / (eta_m + 1.0);
    double dq;
    if (u < 0.5) {
        const double xy = 1.0 - (x - lo) / span;
        const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta_m + 1.0);
        dq = std::pow(val, power) - 1.0;
    } else {
        const double xy = 1.0 - (hi - x) / span;
        const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta_m + 1.0);
        dq = 1.0 - std::pow(val, power);
    }
    return std::clamp(x + dq * span, lo, hi);
}

double polynomial_mutation(double x, double eta_m, double lo, double hi, double p_mut, Rng& rng)
{
    if (!rng.coin(p_mut)) {
        return x;
    }
    return polynomial_perturb(x, rng.uniform(), eta_m, lo, hi);
}

NeuronMatch match_neurons(const Genome& a, const Genome& b)
{
    NeuronMatch match{};
    std::array<bool, kNeurons> taken{};
    for (std::size_t i = 0; i < kNeurons; ++i) {
        std::size_t best = kNeurons;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < kNeurons; ++j) {
            if (taken[j]) {
                continue;
            }
            double d = 0.0;
            for (std::size_t k = 0; k < kInputs; ++k) {
                const double diff = a.kohonen[i][k] - b.kohonen[j][k];
                d += diff * diff;
            }
            if (best == kNeurons || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        match[i] = best;
        taken[best] = true;
    }
    return match;
}

void mutate_output_side(Genome& g, const VariationConfig& cfg, Rng& rng)
{
    for (auto& row : g.grossberg) {
        for (auto& w : row) {
            w = polynomial_mutation(w, cfg.eta_m, kGrossbergBounds.lo, kGrossbergBounds.hi, cfg.p_mut, rng);
        }
    }
    g.slope = polynomial_mutation(g.slope, cfg.eta_m, kSlopeBounds.lo, kSlopeBounds.hi, cfg.p_mut, rng);
}

namespace {

void cross_gene(double& a, double& b, GeneBounds bounds, const VariationConfig& cfg, Rng& rng)
{
    std::tie(a, b) = sbx(a, b, cfg.eta_c, bounds.lo, bounds.hi, rng);
}

template <std::size_t N>
void cross_row(std::array<double, N>& a, std::array<double, N>& b, GeneBounds bounds, const VariationConfig& cfg,
               Rng& rng)
{
    for (std::size_t k = 0; k < N; ++k) {
        cross_gene(a[k], b[k], bounds, cfg, rng);
    }
}

void mutate_input_side(Genome& g, const VariationConfig& cfg, Rng& rng)
{
    for (auto& row : g.kohonen) {
        for (auto& w : row) {
            w = polynomial_mutation(w, cfg.eta_m, kKohonenBounds.lo, kKohonenBounds.hi, cfg.p_mut, rng);
        }
    }
}

// FFNC: no class semantics, every gene is recombined and mutated.
std::pair<Genome, Genome> crossover_dense(const Genome& p1, const Genome& p2, const VariationConfig& cfg, Rng& rng)
{
    Genome c1 = p1;
    Genome c2 = p2;
    if (rng.coin(cfg.p_cross_phase1)) {
        for (std::size_t i = 0; i < kNeurons; ++i) {
            cross_row(c1.kohonen[i], c2.kohonen[i], kKohonenBounds, cfg, rng);
        }
        for (std::size_t i = 0; i < kNeurons; ++i) {
            cross_row(c1.grossberg[i], c2.grossberg[i], kGrossbergBounds, cfg, rng);
        }
        cross_gene(c1.slope, c2.slope, kSlopeBounds, cfg, rng);
    }
    for (Genome* c : {&c1, &c2}) {
        mutate_input_side(*c, cfg, rng);
        mutate_output_side(*c, cfg, rng);
    }
    return {c1, c2};
}

} // namespace

std::pair<Genome, Genome> crossover_phase1(const Genome& p1, const Genome& p2, ControllerKind kind,
                                           const VariationConfig& cfg, Rng& rng)
{
    if (kind == ControllerKind::FFNC) {
        return crossover_dense(p1, p2, cfg, rng);
    }
    Genome c1 = p1;
    Genome c2 = p2;
    if (rng.coin(cfg.p_cross_phase1)) {
        for (std::size_t i = 0; i < kNeurons; ++i) {
            cross_row(c1.grossberg[i], c2.grossberg[i], kGrossbergBounds, cfg, rng);
        }
        cross_gene(c1.slope, c2.slope, kSlopeBounds, cfg, rng);
    }
    mutate_output_side(c1, cfg, rng);
    mutate_output_side(c2, cfg, rng);
    return {c1, c2};
}

std::pair<Genome, Genome> crossover_phase2(const Genome& p1, const Genome& p2, ControllerKind kind,
                                           const VariationConfig& cfg, Rng& rng)
{
    if (kind == ControllerKind::FFNC) {
        return crossover_dense(p1, p2, cfg, rng);
    }
    Genome c1 = p1;
    Genome c2 = p2;
    const NeuronMatch match = match_neurons(p1, p2);
    for (std::size_t i = 0; i < kNeurons; ++i) {
        if (!rng.coin(cfg.p_cross_phase2)) {
            continue;
        }
        const std::size_t j = match[i];
        cross_row(c1.kohonen[i], c2.kohonen[j], kKohonenBounds, cfg, rng);
        cross_row(c1.grossberg[i], c2.grossberg[j], kGrossbergBounds, cfg, rng);
    }
    if (rng.coin(cfg.p_cross_phase2)) {
        cross_gene(c1.slope, c2.slope, kSlopeBounds, cfg, rng);
    }
    mutate_output_side(c1, cfg, rng);
    mutate_output_side(c2, cfg, rng);
    return {c1, c2};
}

} // namespace cpnc
