#pragma once

// Deterministic RNG for reproducible ensemble generation. One RngStream per
// realization, derived from (master_seed, realization_index) via a SplitMix64
// finalizer, so streams are decorrelated and independent of platform. All
// distributions are implemented here rather than with <random>'s distribution
// templates, whose output is implementation-defined.

#include <cstdint>
#include <utility>
#include <vector>

namespace somgen {

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t realization_index);

// xoshiro256++ with SplitMix64 state expansion.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    static RngStream from_master(std::uint64_t master_seed, std::uint64_t realization_index) {
        return RngStream(derive_stream_seed(master_seed, realization_index));
    }

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t uniform_below(std::uint64_t n);

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Standard normal (Marsaglia polar, one value cached).
    double normal();

    /// Poisson variate; exact product method, halved recursively for large means.
    std::uint64_t poisson(double mean);

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze.
    double gamma(double shape);

    /// Beta(a, b) as the usual gamma ratio.
    double beta(double a, double b);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace somgen
