#pragma once

#include <cstdint>
#include <random>

namespace histcl {

/// Seeded random stream. Streams derived via stream() are statistically
/// independent for distinct (seed, id, sub) triples, so parallel generators
/// can draw without coordination and still reproduce bit-identically.
/// The uniform/exponential maps are spelled out rather than taken from
/// <random> distributions, whose sequences are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    static Rng stream(std::uint64_t seed, std::uint64_t id, std::uint64_t sub = 0);

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard exponential via inversion.
    double exponential();

    std::uint64_t next_u64() { return engine_(); }

private:
    static std::uint64_t mix(std::uint64_t x);
    std::mt19937_64 engine_;
};

}  // namespace histcl
