#include "somgen/clb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace somgen {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0))
        throw std::invalid_argument(std::string("ClbParams: ") + name + " must be positive");
}

} // namespace

void ClbParams::validate() const {
    require_positive(mean_clusters, "mean_clusters");
    require_positive(mean_lumps_per_cluster, "mean_lumps_per_cluster");
    require_positive(cluster_spread, "cluster_spread");
    require_positive(lump_length, "lump_length");
    require_positive(lump_width, "lump_width");
    require_positive(alpha_exp, "alpha_exp");
    require_positive(beta_exp, "beta_exp");
    require_positive(amplitude, "amplitude");
    require_positive(bbox_factor, "bbox_factor");
    if (!(normalization.scale > 0.0))
        throw std::invalid_argument("ClbParams: normalization.scale must be positive");
    if (!std::isfinite(normalization.offset))
        throw std::invalid_argument("ClbParams: normalization.offset must be finite");
}

ClbParams ClbParams::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ClbParams::load: cannot open " + path.string());
    nlohmann::json doc = nlohmann::json::parse(in);

    ClbParams p;
    p.mean_clusters = doc.at("mean_clusters").get<double>();
    p.mean_lumps_per_cluster = doc.at("mean_lumps_per_cluster").get<double>();
    p.cluster_spread = doc.at("cluster_spread").get<double>();
    p.lump_length = doc.at("lump_length").get<double>();
    p.lump_width = doc.at("lump_width").get<double>();
    p.alpha_exp = doc.at("alpha_exp").get<double>();
    p.beta_exp = doc.at("beta_exp").get<double>();
    p.amplitude = doc.at("amplitude").get<double>();
    p.bbox_factor = doc.value("bbox_factor", 6.0);
    if (doc.contains("normalization")) {
        const auto& n = doc.at("normalization");
        p.normalization.scale = n.at("scale").get<double>();
        p.normalization.offset = n.at("offset").get<double>();
    }
    p.validate();
    return p;
}

void ClbParams::save(const std::filesystem::path& path) const {
    validate();
    nlohmann::json doc{
        {"mean_clusters", mean_clusters},
        {"mean_lumps_per_cluster", mean_lumps_per_cluster},
        {"cluster_spread", cluster_spread},
        {"lump_length", lump_length},
        {"lump_width", lump_width},
        {"alpha_exp", alpha_exp},
        {"beta_exp", beta_exp},
        {"amplitude", amplitude},
        {"bbox_factor", bbox_factor},
        {"normalization", {{"scale", normalization.scale}, {"offset", normalization.offset}}},
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("ClbParams::save: cannot open " + path.string());
    out << doc.dump(2) << '\n';
}

namespace {

// Single lump: amplitude * exp(-alpha * r^beta / l(theta)) where theta is the
// angle from the lump's own axis and l interpolates elliptically between the
// along-axis and across-axis characteristic lengths.
void add_lump(FloatImage& field, double cx, double cy, double phi, const ClbParams& p,
              double half_extent) {
    const int x_lo = std::max(0, static_cast<int>(std::ceil(cx - half_extent)));
    const int x_hi = std::min(field.width - 1, static_cast<int>(std::floor(cx + half_extent)));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(cy - half_extent)));
    const int y_hi = std::min(field.height - 1, static_cast<int>(std::floor(cy + half_extent)));
    if (x_lo > x_hi || y_lo > y_hi) return;

    const double cos_phi = std::cos(phi);
    const double sin_phi = std::sin(phi);
    const double ll = p.lump_length;
    const double lw = p.lump_width;
    const bool sqrt_profile = p.beta_exp == 0.5; // default; avoids pow in the hot loop

    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            // Rotate into the lump frame; then
            //   l(theta) = ll*lw / hypot(lw*cos, ll*sin)
            //   alpha * r^beta / l(theta) = alpha * r^(beta-1) * hypot(lw*u, ll*v) / (ll*lw)
            const double u = dx * cos_phi + dy * sin_phi;
            const double v = -dx * sin_phi + dy * cos_phi;
            const double r2 = dx * dx + dy * dy;
            double value;
            if (r2 == 0.0) {
                value = p.amplitude;
            } else {
                const double aniso = std::sqrt(lw * lw * u * u + ll * ll * v * v) / (ll * lw);
                const double radial = sqrt_profile ? 1.0 / std::sqrt(std::sqrt(r2))
                                                   : std::pow(r2, 0.5 * (p.beta_exp - 1.0));
                value = p.amplitude * std::exp(-p.alpha_exp * radial * aniso);
            }
            field.at(x, y) += value;
        }
    }
}

} // namespace

FloatImage render_clb_field(const ClbParams& params, RngStream& rng, int width, int height) {
    params.validate();
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("render_clb_field: non-positive dimensions");

    FloatImage field(width, height, 0.0);

    // Homogeneous cluster process: density anchored to mean_clusters per
    // 256x256 of area, realized over the frame plus a margin wide enough that
    // off-frame clusters still contributing lumps are not missed.
    const double margin = 3.0 * params.cluster_spread;
    const double x_min = -margin;
    const double x_max = width + margin;
    const double y_min = -margin;
    const double y_max = height + margin;
    const double density =
        params.mean_clusters / (static_cast<double>(kRealizationSize) * kRealizationSize);
    const double expected_clusters = density * (x_max - x_min) * (y_max - y_min);

    const double l_max = std::max(params.lump_length, params.lump_width);
    const double half_extent =
        params.bbox_factor * std::pow(l_max / params.alpha_exp, 1.0 / params.beta_exp);

    const std::uint64_t n_clusters = rng.poisson(expected_clusters);
    for (std::uint64_t c = 0; c < n_clusters; ++c) {
        const double cx = x_min + rng.uniform() * (x_max - x_min);
        const double cy = y_min + rng.uniform() * (y_max - y_min);
        const std::uint64_t n_lumps = rng.poisson(params.mean_lumps_per_cluster);
        for (std::uint64_t l = 0; l < n_lumps; ++l) {
            const double lx = cx + rng.normal() * params.cluster_spread;
            const double ly = cy + rng.normal() * params.cluster_spread;
            const double phi = rng.uniform() * 2.0 * std::numbers::pi;
            add_lump(field, lx, ly, phi, params, half_extent);
        }
    }
    return field;
}

GrayImage generate_clb(const ClbParams& params, RngStream& rng) {
    const FloatImage field = render_clb_field(params, rng);
    GrayImage out(field.width, field.height);
    for (std::size_t i = 0; i < field.pixels.size(); ++i) {
        const double mapped =
            std::round(params.normalization.scale * field.pixels[i] + params.normalization.offset);
        out.pixels[i] = static_cast<std::uint8_t>(std::clamp(mapped, 0.0, 255.0));
    }
    return out;
}

ClbNormalization calibrate_clb_normalization(const ClbParams& params, std::uint64_t master_seed,
                                             int n_realizations) {
    params.validate();
    if (n_realizations <= 0)
        throw std::invalid_argument("calibrate_clb_normalization: need at least one realization");

    // Pooled fine histogram of raw field values; resolution 1e-3 keeps the
    // percentile error two orders below one gray level.
    constexpr double kBinWidth = 1e-3;
    constexpr double kRangeMax = 200.0;
    std::vector<std::uint64_t> hist(static_cast<std::size_t>(kRangeMax / kBinWidth) + 1, 0);
    std::uint64_t total = 0;

    for (int i = 0; i < n_realizations; ++i) {
        RngStream rng = RngStream::from_master(master_seed, static_cast<std::uint64_t>(i));
        const FloatImage field = render_clb_field(params, rng);
        for (double v : field.pixels) {
            auto bin = static_cast<std::size_t>(std::clamp(v / kBinWidth, 0.0,
                                                           static_cast<double>(hist.size() - 1)));
            ++hist[bin];
            ++total;
        }
    }

    auto percentile = [&](double q) {
        const auto target = static_cast<std::uint64_t>(q * static_cast<double>(total));
        std::uint64_t cum = 0;
        for (std::size_t b = 0; b < hist.size(); ++b) {
            cum += hist[b];
            if (cum >= target) return static_cast<double>(b) * kBinWidth;
        }
        return static_cast<double>(hist.size() - 1) * kBinWidth;
    };

    const double lo = percentile(0.001);
    const double hi = percentile(0.999);
    if (!(hi - lo > 1e-9))
        throw std::runtime_error("calibrate_clb_normalization: degenerate pilot ensemble");

    ClbNormalization norm;
    norm.scale = 255.0 / (hi - lo);
    norm.offset = 0.0 - lo * norm.scale; // keeps the zero-percentile case at +0
    return norm;
}

RadialAutocorrelation radial_autocorrelation(const std::vector<GrayImage>& ensemble, int max_lag) {
    if (ensemble.size() < 100)
        throw std::invalid_argument("radial_autocorrelation: need at least 100 realizations");
    if (max_lag < 1) throw std::invalid_argument("radial_autocorrelation: max_lag must be >= 1");
    const int width = ensemble.front().width;
    const int height = ensemble.front().height;
    if (max_lag >= std::min(width, height))
        throw std::invalid_argument("radial_autocorrelation: max_lag exceeds image extent");

    // Half-plane offsets grouped by integer radius; the mirrored half is
    // redundant for a real-valued field.
    struct Offset {
        int dx, dy, bin;
    };
    std::vector<Offset> offsets;
    for (int dy = 0; dy <= max_lag; ++dy) {
        for (int dx = (dy == 0 ? 0 : -max_lag); dx <= max_lag; ++dx) {
            const int bin = static_cast<int>(std::lround(std::hypot(dx, dy)));
            if (bin <= max_lag) offsets.push_back({dx, dy, bin});
        }
    }

    RadialAutocorrelation result;
    std::vector<double> curve_sum(static_cast<std::size_t>(max_lag) + 1, 0.0);
    std::size_t n_valid = 0;
    std::vector<double> centered(static_cast<std::size_t>(width) * height);

    for (const GrayImage& image : ensemble) {
        if (image.width != width || image.height != height)
            throw std::invalid_argument("radial_autocorrelation: mixed image sizes");

        double mean = 0.0;
        for (std::uint8_t p : image.pixels) mean += p;
        mean /= static_cast<double>(image.pixels.size());
        for (std::size_t i = 0; i < image.pixels.size(); ++i)
            centered[i] = static_cast<double>(image.pixels[i]) - mean;

        std::vector<double> bin_sum(static_cast<std::size_t>(max_lag) + 1, 0.0);
        std::vector<int> bin_count(static_cast<std::size_t>(max_lag) + 1, 0);
        for (const Offset& o : offsets) {
            double acc = 0.0;
            const int x_lo = std::max(0, -o.dx);
            const int x_hi = width - 1 - std::max(0, o.dx);
            for (int y = 0; y + o.dy < height; ++y) {
                const double* row = centered.data() + static_cast<std::size_t>(y) * width;
                const double* shifted =
                    centered.data() + static_cast<std::size_t>(y + o.dy) * width + o.dx;
                for (int x = x_lo; x <= x_hi; ++x) acc += row[x] * shifted[x];
            }
            const auto n_pairs =
                static_cast<double>(x_hi - x_lo + 1) * static_cast<double>(height - o.dy);
            bin_sum[static_cast<std::size_t>(o.bin)] += acc / n_pairs;
            ++bin_count[static_cast<std::size_t>(o.bin)];
        }

        if (!(bin_sum[0] > 0.0)) {
            result.degenerate = true;
            continue;
        }
        const double variance = bin_sum[0]; // bin 0 holds exactly the (0,0) offset
        for (int k = 0; k <= max_lag; ++k)
            curve_sum[static_cast<std::size_t>(k)] +=
                bin_sum[static_cast<std::size_t>(k)] / bin_count[static_cast<std::size_t>(k)] / variance;
        ++n_valid;
    }

    result.correlation.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
    if (n_valid > 0) {
        for (double& v : curve_sum) v /= static_cast<double>(n_valid);
        result.correlation = curve_sum;
    }
    return result;
}

} // namespace somgen
