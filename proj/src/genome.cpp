#include "cpnc/genome.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace cpnc {

std::string to_string(ControllerKind kind)
{
    return kind == ControllerKind::CPNC ? "CPNC" : "FFNC";
}

ControllerKind parse_controller_kind(const std::string& text)
{
    std::string upper = text;
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "CPNC") {
        return ControllerKind::CPNC;
    }
    if (upper == "FFNC") {
        return ControllerKind::FFNC;
    }
    throw std::invalid_argument("unknown controller kind '" + text + "'");
}

Genome decode(std::span<const double> flat)
{
    if (flat.size() != kGenomeLength) {
        throw std::invalid_argument("decode: expected " + std::to_string(kGenomeLength) + " genes, got " +
                                    std::to_string(flat.size()));
    }
    Genome g;
    std::size_t k = 0;
    for (auto& row : g.kohonen) {
        for (auto& w : row) {
            w = flat[k++];
        }
    }
    for (auto& row : g.grossberg) {
        for (auto& w : row) {
            w = flat[k++];
        }
    }
    g.slope = flat[k];
    return g;
}

std::vector<double> encode(const Genome& g)
{
    std::vector<double> flat;
    flat.reserve(kGenomeLength);
    for (const auto& row : g.kohonen) {
        flat.insert(flat.end(), row.begin(), row.end());
    }
    for (const auto& row : g.grossberg) {
        flat.insert(flat.end(), row.begin(), row.end());
    }
    flat.push_back(g.slope);
    return flat;
}

bool satisfies_invariants(const Genome& g)
{
    auto within = [](double v, GeneBounds b) { return std::isfinite(v) && v >= b.lo && v <= b.hi; };
    for (const auto& row : g.kohonen) {
        if (!std::all_of(row.begin(), row.end(), [&](double w) { return within(w, kKohonenBounds); })) {
            return false;
        }
    }
    for (const auto& row : g.grossberg) {
        if (!std::all_of(row.begin(), row.end(), [&](double w) { return within(w, kGrossbergBounds); })) {
            return false;
        }
    }
    return std::isfinite(g.slope) && g.slope > 0.0;
}

Genome random_genome(Rng& rng)
{
    Genome g;
    for (auto& row : g.kohonen) {
        for (auto& w : row) {
            w = rng.uniform(kKohonenBounds.lo, kKohonenBounds.hi);
        }
    }
    for (auto& row : g.grossberg) {
        for (auto& w : row) {
            w = rng.uniform(kGrossbergBounds.lo, kGrossbergBounds.hi);
        }
    }
    g.slope = rng.uniform(kSlopeInit.lo, kSlopeInit.hi);
    return g;
}

} // namespace cpnc
