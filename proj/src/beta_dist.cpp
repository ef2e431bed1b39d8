#include "somgen/beta_dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace somgen {

void BetaSpec::validate() const {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw std::invalid_argument("beta shape parameters must be positive");
    }
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("beta scale must be positive");
    }
    if (max_value() < min_value()) {
        throw std::invalid_argument("beta scale too small: empty integer support");
    }
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("incomplete beta requires positive shapes");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);

    // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to keep the continued
    // fraction in its fast-converging regime.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double scaled_beta_cdf(const BetaSpec& spec, double v) {
    const double u = (v - spec.lambda) / spec.sigma;
    return regularized_incomplete_beta(spec.alpha, spec.beta, u);
}

int sample_scaled_beta(const BetaSpec& spec, RngStream& rng) {
    const double b = rng.beta(spec.alpha, spec.beta);
    const double v = spec.lambda + spec.sigma * b;
    int out = static_cast<int>(std::lround(v));
    const int lo = spec.min_value();
    const int hi = spec.max_value();
    if (out < lo) out = lo;
    if (out > hi) out = hi;
    return out;
}

std::vector<double> scaled_beta_pmf(const BetaSpec& spec) {
    spec.validate();
    const int lo = spec.min_value();
    const int hi = spec.max_value();
    const int n = hi - lo + 1;
    std::vector<double> pmf(static_cast<std::size_t>(n), 0.0);

    // Interior bin k covers (k-0.5, k+0.5]; the first and last bins also
    // absorb everything the clamp folds onto them.
    double prev = 0.0; // CDF at lower edge of current bin
    for (int k = lo; k <= hi; ++k) {
        double upper;
        if (k == hi) {
            upper = 1.0;
        } else {
            upper = scaled_beta_cdf(spec, k + 0.5);
        }
        pmf[static_cast<std::size_t>(k - lo)] = upper - prev;
        prev = upper;
    }
    return pmf;
}

} // namespace somgen
