#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output sequence is
// fixed by the standard; the distributions below are written out by hand because the
// std:: distributions are implementation-defined.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace drsne {

using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64";

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

/// Standard normal sampler (Box-Muller, pairs cached).
class NormalSampler {
public:
    double operator()(Rng& rng) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(rng);
        while (u1 <= 0.0) u1 = uniform01(rng);
        const double u2 = uniform01(rng);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace drsne
