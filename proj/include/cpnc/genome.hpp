#pragma once

#include "cpnc/random.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpnc {

inline constexpr std::size_t kNeurons = 9;
inline constexpr std::size_t kInputs = 16;
inline constexpr std::size_t kOutputs = 2;
inline constexpr std::size_t kKohonenGenes = kNeurons * kInputs;
inline constexpr std::size_t kGrossbergGenes = kNeurons * kOutputs;
inline constexpr std::size_t kGenomeLength = kKohonenGenes + kGrossbergGenes + 1;
static_assert(kGenomeLength == 163);

using KohonenRow = std::array<double, kInputs>;
using GrossbergRow = std::array<double, kOutputs>;

/// Fixed-structure controller genome. The CPNC reads `kohonen` as class prototypes in
/// sensor space and `grossberg` as per-class wheel commands; the FFNC reads the same
/// arrays as dense input->hidden and hidden->output weights.
struct Genome {
    std::array<KohonenRow, kNeurons> kohonen{};
    std::array<GrossbergRow, kNeurons> grossberg{};
    double slope = 1.0;

    friend bool operator==(const Genome&, const Genome&) = default;
};

enum class ControllerKind { CPNC, FFNC };

std::string to_string(ControllerKind kind);
/// Accepts "CPNC"/"FFNC" (case-insensitive). Throws std::invalid_argument otherwise.
ControllerKind parse_controller_kind(const std::string& text);

struct GeneBounds {
    double lo;
    double hi;
};

inline constexpr GeneBounds kKohonenBounds{0.0, 1.0};
inline constexpr GeneBounds kGrossbergBounds{-1.0, 1.0};
inline constexpr GeneBounds kSlopeBounds{0.1, 10.0};
inline constexpr GeneBounds kSlopeInit{0.5, 5.0};

/// Layout: kohonen row-major (9x16), grossberg row-major (9x2), slope.
/// Throws std::invalid_argument unless flat.size() == 163.
Genome decode(std::span<const double> flat);
std::vector<double> encode(const Genome& g);

/// Length, slope > 0 and per-layer bounds.
bool satisfies_invariants(const Genome& g);

/// kohonen ~ U[0,1], grossberg ~ U[-1,1], slope ~ U[0.5,5].
Genome random_genome(Rng& rng);

} // namespace cpnc
