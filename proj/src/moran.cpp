#include "somgen/moran.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace somgen {

MoranResult moran_i(const TileView& tile) {
    const int s = tile.size;
    const int n = s * s;
    if (n < 4) throw std::invalid_argument("moran tile too small");

    std::vector<double> dev(static_cast<std::size_t>(n));
    double mean = 0.0;
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            mean += tile.at(x, y);
        }
    }
    mean /= n;

    double m2 = 0.0; // sum of squared deviations
    double m4 = 0.0;
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const double d = tile.at(x, y) - mean;
            dev[static_cast<std::size_t>(y * s + x)] = d;
            m2 += d * d;
            m4 += d * d * d * d;
        }
    }

    MoranResult r;
    r.expected = -1.0 / (n - 1);
    if (m2 <= 0.0) {
        r.degenerate = true;
        return r;
    }

    // Cross products over rook pairs; each undirected edge counted twice to
    // match the symmetric binary weight matrix.
    double cross = 0.0;
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            const double d = dev[static_cast<std::size_t>(y * s + x)];
            if (x + 1 < s) cross += d * dev[static_cast<std::size_t>(y * s + x + 1)];
            if (y + 1 < s) cross += d * dev[static_cast<std::size_t>((y + 1) * s + x)];
        }
    }
    cross *= 2.0;

    const double W = 2.0 * (2.0 * s * (s - 1)); // directed rook weight total
    r.I = (n / W) * (cross / m2);

    // Randomization-null variance. S1 = 2W for binary symmetric weights;
    // S2 = sum over sites of (row sum + column sum)^2 = 4 * sum(deg^2).
    double sum_deg_sq = 0.0;
    for (int y = 0; y < s; ++y) {
        for (int x = 0; x < s; ++x) {
            int deg = 0;
            if (x > 0) ++deg;
            if (x + 1 < s) ++deg;
            if (y > 0) ++deg;
            if (y + 1 < s) ++deg;
            sum_deg_sq += static_cast<double>(deg) * deg;
        }
    }
    const double S1 = 2.0 * W;
    const double S2 = 4.0 * sum_deg_sq;
    const double b2 = n * m4 / (m2 * m2);
    const double nd = n;
    const double A = nd * ((nd * nd - 3.0 * nd + 3.0) * S1 - nd * S2 + 3.0 * W * W);
    const double B = b2 * ((nd * nd - nd) * S1 - 2.0 * nd * S2 + 6.0 * W * W);
    const double denom = (nd - 1.0) * (nd - 2.0) * (nd - 3.0) * W * W;
    r.variance = (A - B) / denom - r.expected * r.expected;
    if (r.variance <= 0.0) {
        r.degenerate = true;
        return r;
    }
    r.z = (r.I - r.expected) / std::sqrt(r.variance);
    return r;
}

double moran_violation_rate(const TileGrid& grid, double alpha) {
    if (grid.tiles.empty()) throw std::invalid_argument("no tiles");
    const double zcrit = normal_quantile(1.0 - alpha / 2.0);
    int violations = 0;
    for (const TileView& tile : grid.tiles) {
        const MoranResult r = moran_i(tile);
        if (!r.degenerate && std::fabs(r.z) > zcrit) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(grid.tiles.size());
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("normal quantile probability must lie in (0,1)");
    }
    // Acklam's rational approximation refined by one Halley step; accurate to
    // ~1e-15 over (0,1).
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};

    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement using erfc for the CDF.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

} // namespace somgen
