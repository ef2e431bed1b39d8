#include "somgen/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace somgen {

std::vector<double> mid_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

SpearmanResult spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("spearman inputs must have equal length");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("spearman needs at least two observations");
    }
    const std::vector<double> ra = mid_ranks(a);
    const std::vector<double> rb = mid_ranks(b);

    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - ma;
        const double db = rb[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    SpearmanResult r;
    if (saa <= 0.0 || sbb <= 0.0) {
        r.defined = false;
        return r;
    }
    r.rho = sab / std::sqrt(saa * sbb);
    return r;
}

double sample_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<std::pair<double, double>> qq_pairs(const std::vector<double>& a,
                                                const std::vector<double>& b, int n) {
    if (n < 1) throw std::invalid_argument("qq_pairs needs n >= 1");
    std::vector<double> sa = a;
    std::vector<double> sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    auto quant = [](const std::vector<double>& s, double p) {
        const double h = static_cast<double>(s.size() - 1) * p;
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, s.size() - 1);
        return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
    };

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = (i + 0.5) / n;
        pairs.emplace_back(quant(sa, p), quant(sb, p));
    }
    return pairs;
}

double histogram_quantile(const std::vector<std::uint64_t>& counts, int min_value,
                          double p) {
    const std::uint64_t total =
        std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) throw std::invalid_argument("quantile of empty histogram");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile p outside [0,1]");

    // Position on the virtual sorted sample of size `total`.
    const double h = static_cast<double>(total - 1) * p;
    const std::uint64_t lo_idx = static_cast<std::uint64_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo_idx);

    auto value_at = [&](std::uint64_t idx) {
        std::uint64_t seen = 0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            seen += counts[k];
            if (idx < seen) return static_cast<double>(min_value + static_cast<int>(k));
        }
        return static_cast<double>(min_value + static_cast<int>(counts.size()) - 1);
    };

    const double v_lo = value_at(lo_idx);
    if (frac == 0.0) return v_lo;
    const double v_hi = value_at(lo_idx + 1);
    return v_lo + frac * (v_hi - v_lo);
}

double max_quantile_gap(const std::vector<std::uint64_t>& counts_a,
                        const std::vector<std::uint64_t>& counts_b, int min_value,
                        int n) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = (i + 0.5) / n;
        const double qa = histogram_quantile(counts_a, min_value, p);
        const double qb = histogram_quantile(counts_b, min_value, p);
        worst = std::max(worst, std::fabs(qa - qb));
    }
    return worst;
}

} // namespace somgen
