#pragma once

#include <cstdint>

namespace gridstudies {

/// Deterministic random stream. Every draw is derived from a 64-bit state
/// with fixed arithmetic, so sequences are identical across platforms and
/// standard-library implementations (std::*_distribution is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent stream for item `index` of a run seeded with `seed`.
    static Rng for_item(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Standard normal draw (Marsaglia polar method).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Log-normal draw parameterized by median and standard deviation of ln x.
    double lognormal(double median, double sigma_ln);

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gridstudies
