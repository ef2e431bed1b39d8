#pragma once

// Four-parameter scaled Beta distribution and its integer-rounded form, the
// prescribed pixel law of the flags SOM.

#include <cstdint>
#include <vector>

#include "somgen/rng.hpp"

namespace somgen {

struct BetaSpec {
    double alpha = 1.0;
    double beta = 1.0;
    double lambda = 0.0; // location offset, intensity units
    double sigma = 1.0;  // scale, intensity units

    void validate() const;

    double mean() const { return lambda + sigma * alpha / (alpha + beta); }
    double variance() const {
        const double ab = alpha + beta;
        return sigma * sigma * alpha * beta / (ab * ab * (ab + 1.0));
    }

    /// Smallest/largest integer value the rounded sampler can emit.
    int min_value() const { return static_cast<int>(lambda) + 1; }
    int max_value() const { return static_cast<int>(lambda + sigma) - 1; }
};

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// CDF of the continuous scaled Beta at value v.
double scaled_beta_cdf(const BetaSpec& spec, double v);

/// One integer intensity: round(lambda + sigma*B), clamped into
/// [min_value, max_value] so rounding never escapes the prescribed range.
int sample_scaled_beta(const BetaSpec& spec, RngStream& rng);

/// Exact pmf of sample_scaled_beta over [min_value, max_value]; edge bins
/// absorb the tail mass that clamping folds in.
std::vector<double> scaled_beta_pmf(const BetaSpec& spec);

} // namespace somgen
