#include "somgen/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace somgen {

std::uint64_t IntensityHistogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

void IntensityHistogram::add(int value) {
    const int idx = value - min_value;
    if (idx < 0 || idx >= static_cast<int>(counts.size())) {
        throw std::out_of_range("intensity outside histogram support");
    }
    ++counts[static_cast<std::size_t>(idx)];
}

IntensityHistogram make_histogram(const BetaSpec& spec) {
    spec.validate();
    IntensityHistogram hist;
    hist.min_value = spec.min_value();
    hist.counts.assign(static_cast<std::size_t>(spec.max_value() - spec.min_value() + 1), 0);
    return hist;
}

void accumulate_tile(IntensityHistogram& hist, const TileView& tile) {
    for (int y = 0; y < tile.size; ++y) {
        for (int x = 0; x < tile.size; ++x) {
            hist.add(tile.at(x, y));
        }
    }
}

void accumulate_image(IntensityHistogram& hist, const GrayImage& image) {
    for (const std::uint8_t v : image.pixels) {
        hist.add(static_cast<int>(v));
    }
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& pmf, double min_expected) {
    if (observed.size() != pmf.size()) {
        throw std::invalid_argument("observed counts and pmf length mismatch");
    }
    const double total = static_cast<double>(
        std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    if (total <= 0.0) {
        throw std::invalid_argument("chi-square needs a nonempty sample");
    }

    // Merge adjacent bins left-to-right until each expected count clears the
    // floor; a trailing underweight group is folded into its left neighbor.
    std::vector<double> merged_obs;
    std::vector<double> merged_exp;
    double acc_obs = 0.0;
    double acc_exp = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc_obs += static_cast<double>(observed[i]);
        acc_exp += pmf[i] * total;
        if (acc_exp >= min_expected) {
            merged_obs.push_back(acc_obs);
            merged_exp.push_back(acc_exp);
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if (acc_exp > 0.0 || acc_obs > 0.0) {
        if (merged_obs.empty()) {
            merged_obs.push_back(acc_obs);
            merged_exp.push_back(acc_exp);
        } else {
            merged_obs.back() += acc_obs;
            merged_exp.back() += acc_exp;
        }
    }

    ChiSquareResult result;
    result.bins_used = static_cast<int>(merged_obs.size());
    for (std::size_t i = 0; i < merged_obs.size(); ++i) {
        if (merged_exp[i] <= 0.0) continue;
        const double diff = merged_obs[i] - merged_exp[i];
        result.statistic += diff * diff / merged_exp[i];
    }
    result.dof = std::max(1, result.bins_used - 1);
    result.p_value = 1.0 - chi_square_cdf(result.statistic, result.dof);
    return result;
}

ChiSquareResult chi_square_gof(const IntensityHistogram& hist, const BetaSpec& spec,
                               int n_bins, double min_expected) {
    const Histogram binned = bin_histogram(hist, n_bins);
    const std::vector<double> probs =
        bin_pmf(scaled_beta_pmf(spec), spec.min_value(), binned.bin_edges);
    return chi_square_gof(binned.counts, probs, min_expected);
}

Histogram bin_histogram(const IntensityHistogram& hist, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("need at least one bin");
    Histogram out;
    const double lo = hist.min_value - 0.5;
    const double hi = hist.max_value() + 0.5;
    const double width = (hi - lo) / n_bins;
    out.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
    for (int i = 0; i <= n_bins; ++i) {
        out.bin_edges[static_cast<std::size_t>(i)] = lo + width * i;
    }
    out.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        const double v = hist.min_value + static_cast<double>(k);
        int bin = static_cast<int>((v - lo) / width);
        if (bin < 0) bin = 0;
        if (bin >= n_bins) bin = n_bins - 1;
        out.counts[static_cast<std::size_t>(bin)] += hist.counts[k];
    }
    return out;
}

std::vector<double> bin_pmf(const std::vector<double>& pmf, int min_value,
                            const std::vector<double>& bin_edges) {
    if (bin_edges.size() < 2) throw std::invalid_argument("need at least one bin");
    const std::size_t n_bins = bin_edges.size() - 1;
    const double lo = bin_edges.front();
    const double width = (bin_edges.back() - lo) / static_cast<double>(n_bins);
    std::vector<double> probs(n_bins, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) {
        const double v = min_value + static_cast<double>(k);
        int bin = static_cast<int>((v - lo) / width);
        if (bin < 0) bin = 0;
        if (bin >= static_cast<int>(n_bins)) bin = static_cast<int>(n_bins) - 1;
        probs[static_cast<std::size_t>(bin)] += pmf[k];
    }
    return probs;
}

MixturePmf mixture_pmf(const BetaSpec& a, double weight_a, const BetaSpec& b) {
    if (!(weight_a >= 0.0 && weight_a <= 1.0)) {
        throw std::invalid_argument("mixture weight outside [0,1]");
    }
    MixturePmf mix;
    mix.min_value = std::min(a.min_value(), b.min_value());
    const int max_value = std::max(a.max_value(), b.max_value());
    mix.probs.assign(static_cast<std::size_t>(max_value - mix.min_value + 1), 0.0);

    const std::vector<double> pa = scaled_beta_pmf(a);
    const std::vector<double> pb = scaled_beta_pmf(b);
    for (std::size_t k = 0; k < pa.size(); ++k) {
        mix.probs[static_cast<std::size_t>(a.min_value() - mix.min_value) + k] +=
            weight_a * pa[k];
    }
    for (std::size_t k = 0; k < pb.size(); ++k) {
        mix.probs[static_cast<std::size_t>(b.min_value() - mix.min_value) + k] +=
            (1.0 - weight_a) * pb[k];
    }
    return mix;
}

double mixture_quantile(const MixturePmf& mix, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile p outside [0,1]");
    double cdf = 0.0;
    for (std::size_t k = 0; k < mix.probs.size(); ++k) {
        cdf += mix.probs[k];
        if (cdf >= p) return static_cast<double>(mix.min_value + static_cast<int>(k));
    }
    return static_cast<double>(mix.min_value + static_cast<int>(mix.probs.size()) - 1);
}

namespace {

// Lower regularized incomplete gamma: series for x < a+1, continued fraction
// otherwise.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double chi_square_cdf(double x, int dof) {
    if (dof <= 0) throw std::invalid_argument("chi-square dof must be positive");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chi_square_quantile(double p, int dof) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("quantile probability must lie in (0,1)");
    }
    // Bisection is plenty: the CDF is monotone and cheap.
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (chi_square_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi_square_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

ToleranceCalibration calibrate_tolerance(std::vector<double> statistics, double quantile) {
    if (statistics.empty()) {
        throw std::invalid_argument("tolerance calibration needs at least one statistic");
    }
    if (!(quantile >= 0.0 && quantile <= 1.0)) {
        throw std::invalid_argument("calibration quantile must lie in [0,1]");
    }
    std::sort(statistics.begin(), statistics.end());

    // Linear interpolation between order statistics (the common "type 7"
    // definition): h = (n-1)q, value = s[floor(h)] + frac(h)*(s[ceil(h)]-s[floor(h)]).
    const std::size_t n = statistics.size();
    const double h = static_cast<double>(n - 1) * quantile;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = h - static_cast<double>(lo);

    ToleranceCalibration cal;
    cal.quantile = quantile;
    cal.threshold = statistics[lo] + frac * (statistics[hi] - statistics[lo]);
    cal.statistics = std::move(statistics);
    return cal;
}

} // namespace somgen
