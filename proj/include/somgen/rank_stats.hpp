#pragma once

// Rank correlation and quantile-quantile utilities shared by the recovery
// evaluators.

#include <cstdint>
#include <utility>
#include <vector>

namespace somgen {

struct SpearmanResult {
    double rho = 0.0;
    bool defined = true; // false when either variable is all-tied
};

/// Spearman rank correlation with mid-ranks for ties. An all-tied variable
/// makes the coefficient undefined; that is flagged, not guessed.
SpearmanResult spearman_rho(const std::vector<double>& a, const std::vector<double>& b);

/// Mid-ranks (1-based; ties share the average of their rank range).
std::vector<double> mid_ranks(const std::vector<double>& values);

/// Linear-interpolation sample quantile (order statistics, type 7).
double sample_quantile(std::vector<double> values, double p);

/// Matched quantile pairs of two samples at probabilities (i+0.5)/n,
/// i = 0..n-1. Used for QQ comparisons of pooled pixel sets.
std::vector<std::pair<double, double>> qq_pairs(const std::vector<double>& a,
                                                const std::vector<double>& b, int n);

/// Quantile of an integer-valued sample given as a histogram over
/// [min_value, min_value + counts.size() - 1]; linear interpolation on the
/// flattened sorted sample without materializing it.
double histogram_quantile(const std::vector<std::uint64_t>& counts, int min_value,
                          double p);

/// Largest absolute quantile gap between two integer histograms, probed at
/// (i+0.5)/n. The workhorse behind "pooled pixel QQ within +/- tolerance".
double max_quantile_gap(const std::vector<std::uint64_t>& counts_a,
                        const std::vector<std::uint64_t>& counts_b, int min_value,
                        int n);

} // namespace somgen
