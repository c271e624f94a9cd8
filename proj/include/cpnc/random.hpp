#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace cpnc {

/// Seeded 64-bit generator. Draw helpers are defined here rather than through
/// std distributions so that a seed maps to the same stream on every toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [0, n). n must be positive.
    std::size_t index(std::size_t n)
    {
        // Rejection sampling removes modulo bias.
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    bool coin(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace cpnc
