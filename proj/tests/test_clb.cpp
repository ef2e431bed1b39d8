#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "somgen/clb.hpp"
#include "somgen/rng.hpp"

using namespace somgen;

namespace {

GrayImage quantize(const FloatImage& field, const ClbNormalization& norm) {
    GrayImage out(field.width, field.height);
    for (std::size_t i = 0; i < field.pixels.size(); ++i) {
        const double mapped = std::round(norm.scale * field.pixels[i] + norm.offset);
        out.pixels[i] = static_cast<std::uint8_t>(std::clamp(mapped, 0.0, 255.0));
    }
    return out;
}

} // namespace

TEST_CASE("clustered lumpy parameters: validation and JSON round trip") {
    ClbParams params;
    CHECK_NOTHROW(params.validate());

    SUBCASE("non-positive fields are rejected") {
        ClbParams bad = params;
        bad.mean_clusters = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = params;
        bad.beta_exp = -1.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = params;
        bad.lump_width = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        bad = params;
        bad.normalization.scale = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    }

    SUBCASE("save/load preserves every field") {
        params.mean_clusters = 11.25;
        params.normalization = {25.638447617, -3.25};
        const std::filesystem::path file =
            std::filesystem::temp_directory_path() / "somgen_clb_params.json";
        params.save(file);
        const ClbParams loaded = ClbParams::load(file);
        CHECK(loaded.mean_clusters == params.mean_clusters);
        CHECK(loaded.mean_lumps_per_cluster == params.mean_lumps_per_cluster);
        CHECK(loaded.cluster_spread == params.cluster_spread);
        CHECK(loaded.lump_length == params.lump_length);
        CHECK(loaded.lump_width == params.lump_width);
        CHECK(loaded.alpha_exp == params.alpha_exp);
        CHECK(loaded.beta_exp == params.beta_exp);
        CHECK(loaded.amplitude == params.amplitude);
        CHECK(loaded.bbox_factor == params.bbox_factor);
        CHECK(loaded.normalization.scale == params.normalization.scale);
        CHECK(loaded.normalization.offset == params.normalization.offset);
        std::filesystem::remove(file);
    }

    SUBCASE("loading a missing file throws") {
        CHECK_THROWS_AS(ClbParams::load("/nonexistent/clb.json"), std::runtime_error);
    }
}

TEST_CASE("clustered lumpy field: determinism and degenerate cases") {
    ClbParams params;
    params.normalization = {25.0, 0.0};

    SUBCASE("same seed renders the identical field, different seed does not") {
        RngStream a = RngStream::from_master(11, 0);
        RngStream b = RngStream::from_master(11, 0);
        RngStream c = RngStream::from_master(11, 1);
        const FloatImage fa = render_clb_field(params, a);
        const FloatImage fb = render_clb_field(params, b);
        const FloatImage fc = render_clb_field(params, c);
        CHECK(fa.pixels == fb.pixels);
        CHECK(fa.pixels != fc.pixels);
    }

    SUBCASE("a vanishing cluster rate yields the flat background") {
        ClbParams empty = params;
        empty.mean_clusters = 1e-12;
        RngStream rng = RngStream::from_master(12, 0);
        const GrayImage image = generate_clb(empty, rng);
        for (std::uint8_t p : image.pixels) CHECK(p == 0);
    }

    SUBCASE("quantization is the documented affine map") {
        params.normalization = {25.638447617, -1.0};
        RngStream r1 = RngStream::from_master(13, 0);
        RngStream r2 = RngStream::from_master(13, 0);
        const GrayImage direct = generate_clb(params, r1);
        const GrayImage manual = quantize(render_clb_field(params, r2), params.normalization);
        CHECK(direct == manual);
    }

    SUBCASE("doubling the amplitude exactly doubles the field") {
        ClbParams doubled = params;
        doubled.amplitude = 2.0;
        RngStream r1 = RngStream::from_master(14, 0);
        RngStream r2 = RngStream::from_master(14, 0);
        const FloatImage base = render_clb_field(params, r1);
        const FloatImage twice = render_clb_field(doubled, r2);
        REQUIRE(base.pixels.size() == twice.pixels.size());
        for (std::size_t i = 0; i < base.pixels.size(); ++i)
            CHECK(twice.pixels[i] == 2.0 * base.pixels[i]);
    }
}

TEST_CASE("clustered lumpy field: mean grows linearly with the cluster rate") {
    ClbParams params;
    const std::vector<double> rates = {2.0, 4.0, 8.0, 16.0};
    std::vector<double> means;
    for (std::size_t rate_idx = 0; rate_idx < rates.size(); ++rate_idx) {
        ClbParams p = params;
        p.mean_clusters = rates[rate_idx];
        double acc = 0.0;
        const int n = 200;
        for (int i = 0; i < n; ++i) {
            RngStream rng =
                RngStream::from_master(0xc1b, static_cast<std::uint64_t>(i) * 4 + rate_idx);
            const FloatImage field = render_clb_field(p, rng, 64, 64);
            double sum = 0.0;
            for (double v : field.pixels) sum += v;
            acc += sum / static_cast<double>(field.pixels.size());
        }
        means.push_back(acc / n);
    }

    // Pearson R^2 of ensemble mean against the rate.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const int n = static_cast<int>(rates.size());
    for (int i = 0; i < n; ++i) {
        sx += rates[static_cast<std::size_t>(i)];
        sy += means[static_cast<std::size_t>(i)];
        sxx += rates[static_cast<std::size_t>(i)] * rates[static_cast<std::size_t>(i)];
        sxy += rates[static_cast<std::size_t>(i)] * means[static_cast<std::size_t>(i)];
        syy += means[static_cast<std::size_t>(i)] * means[static_cast<std::size_t>(i)];
    }
    const double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(r * r > 0.98);
    CHECK(means[3] > means[2]);
    CHECK(means[2] > means[1]);
    CHECK(means[1] > means[0]);
}

TEST_CASE("pilot normalization calibration") {
    ClbParams params;

    SUBCASE("needs at least one realization") {
        CHECK_THROWS_AS(calibrate_clb_normalization(params, 1, 0), std::invalid_argument);
    }

    SUBCASE("a flat pilot ensemble is rejected as degenerate") {
        ClbParams empty = params;
        empty.mean_clusters = 1e-12;
        CHECK_THROWS_AS(calibrate_clb_normalization(empty, 1, 2), std::runtime_error);
    }

    SUBCASE("calibrated map spreads a pilot image across the 8-bit range") {
        const ClbNormalization norm = calibrate_clb_normalization(params, 0x717, 8);
        CHECK(norm.scale > 0.0);
        CHECK(norm.offset <= 0.0);

        ClbParams calibrated = params;
        calibrated.normalization = norm;
        RngStream rng = RngStream::from_master(0x717, 0);
        const GrayImage image = generate_clb(calibrated, rng);
        int lo = 255, hi = 0;
        for (std::uint8_t p : image.pixels) {
            lo = std::min<int>(lo, p);
            hi = std::max<int>(hi, p);
        }
        CHECK(lo <= 10);
        CHECK(hi >= 180);
    }
}

TEST_CASE("radial autocorrelation: contracts and reference signals") {
    SUBCASE("fewer than 100 realizations are refused") {
        std::vector<GrayImage> ensemble(99, GrayImage(16, 16, 0));
        CHECK_THROWS_AS(radial_autocorrelation(ensemble, 4), std::invalid_argument);
    }

    SUBCASE("lag bounds are enforced") {
        std::vector<GrayImage> ensemble(100, GrayImage(16, 16, 0));
        CHECK_THROWS_AS(radial_autocorrelation(ensemble, 0), std::invalid_argument);
        CHECK_THROWS_AS(radial_autocorrelation(ensemble, 16), std::invalid_argument);
    }

    SUBCASE("mixed image sizes are refused") {
        std::vector<GrayImage> ensemble(100, GrayImage(16, 16, 0));
        ensemble[50] = GrayImage(16, 17, 0);
        CHECK_THROWS_AS(radial_autocorrelation(ensemble, 4), std::invalid_argument);
    }

    SUBCASE("constant realizations set the degenerate flag") {
        std::vector<GrayImage> ensemble(100, GrayImage(16, 16, 42));
        const RadialAutocorrelation ac = radial_autocorrelation(ensemble, 4);
        CHECK(ac.degenerate);
    }

    SUBCASE("white noise decorrelates immediately") {
        RngStream rng(0xaaa);
        std::vector<GrayImage> ensemble;
        for (int i = 0; i < 100; ++i) {
            GrayImage g(64, 64);
            for (std::uint8_t& p : g.pixels) p = static_cast<std::uint8_t>(rng.uniform_below(256));
            ensemble.push_back(std::move(g));
        }
        const RadialAutocorrelation ac = radial_autocorrelation(ensemble, 5);
        CHECK_FALSE(ac.degenerate);
        CHECK(ac.correlation[0] == doctest::Approx(1.0));
        for (std::size_t k = 1; k < ac.correlation.size(); ++k)
            CHECK(std::fabs(ac.correlation[k]) < 0.02);
    }

    SUBCASE("lumpy realizations decay monotonically") {
        ClbParams params;
        const ClbNormalization norm{25.638447617, 0.0};
        std::vector<GrayImage> ensemble;
        for (int i = 0; i < 100; ++i) {
            RngStream rng = RngStream::from_master(0xbbb, static_cast<std::uint64_t>(i));
            ensemble.push_back(quantize(render_clb_field(params, rng, 64, 64), norm));
        }
        const RadialAutocorrelation ac = radial_autocorrelation(ensemble, 8);
        CHECK_FALSE(ac.degenerate);
        CHECK(ac.correlation[0] == doctest::Approx(1.0));
        for (std::size_t k = 1; k < ac.correlation.size(); ++k) {
            CHECK(ac.correlation[k] <= ac.correlation[k - 1] + 1e-9);
            CHECK(ac.correlation[k] > 0.0); // long-range structure, not noise
        }
    }
}
