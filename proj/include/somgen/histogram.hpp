#pragma once

// Intensity histograms, chi-square goodness-of-fit with low-count merging,
// and empirical tolerance calibration for the GOF statistic.

#include <cstdint>
#include <vector>

#include "somgen/beta_dist.hpp"
#include "somgen/gray_image.hpp"

namespace somgen {

/// Counts over the integer support [min_value, max_value] of a BetaSpec.
struct IntensityHistogram {
    int min_value = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t total() const;
    void add(int value);
    int max_value() const { return min_value + static_cast<int>(counts.size()) - 1; }
};

IntensityHistogram make_histogram(const BetaSpec& spec);
void accumulate_tile(IntensityHistogram& hist, const TileView& tile);
void accumulate_image(IntensityHistogram& hist, const GrayImage& image);

/// Equal-width binning of an integer-valued sample: `bin_edges` has one more
/// entry than `counts`; integer value v falls into the bin whose half-open
/// interval [edge_i, edge_{i+1}) contains it.
struct Histogram {
    std::vector<double> bin_edges;
    std::vector<std::uint64_t> counts;
};

/// Rebin per-integer counts into `n_bins` equal-width bins spanning
/// [min_value - 0.5, max_value + 0.5].
Histogram bin_histogram(const IntensityHistogram& hist, int n_bins = 32);

/// Probability mass of a per-integer pmf rebinned onto the same edges
/// (support offset by min_value).
std::vector<double> bin_pmf(const std::vector<double>& pmf, int min_value,
                            const std::vector<double>& bin_edges);

/// A two-component integer mixture (e.g. foreground/background pixel law)
/// over the union support of both components.
struct MixturePmf {
    int min_value = 0;
    std::vector<double> probs;
};

MixturePmf mixture_pmf(const BetaSpec& a, double weight_a, const BetaSpec& b);

/// Quantile of the analytic mixture: the smallest integer whose CDF reaches p.
double mixture_quantile(const MixturePmf& mix, double p);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;          // merged bins minus one
    int bins_used = 0;    // bins remaining after merging
    double p_value = 1.0; // upper-tail probability
};

/// Chi-square GOF of observed counts against a model pmf over the same
/// support. Expected counts are scaled to the observed total; adjacent bins
/// are merged left-to-right until every expected count is at least
/// `min_expected`.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& pmf,
                               double min_expected = 5.0);

/// The standard per-realization test: 32 equal-width bins over the spec's
/// support, expected masses from the exact rounded-sample pmf.
ChiSquareResult chi_square_gof(const IntensityHistogram& hist, const BetaSpec& spec,
                               int n_bins = 32, double min_expected = 5.0);

/// Upper-tail chi-square p-value and quantile via the regularized incomplete
/// gamma function.
double regularized_gamma_p(double a, double x);
double chi_square_cdf(double x, int dof);
double chi_square_quantile(double p, int dof);

struct ToleranceCalibration {
    double threshold = 0.0;  // quantile of the sampled statistics
    double quantile = 0.995; // requested probability level
    std::vector<double> statistics; // sorted sample used for the estimate
};

/// Empirical quantile (linear interpolation between order statistics) of a
/// sample of GOF statistics; used to freeze pass thresholds from a null run.
ToleranceCalibration calibrate_tolerance(std::vector<double> statistics,
                                         double quantile = 0.995);

} // namespace somgen
