#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fracfie {

/// Seeded generator whose output is identical across standard libraries:
/// mt19937_64 is fully specified, and the conversions below avoid the
/// implementation-defined std::*_distribution algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard exponential variate.
    double exponential() { return -std::log1p(-uniform()); }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace fracfie
