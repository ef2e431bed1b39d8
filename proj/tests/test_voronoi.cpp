#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "somgen/rank_stats.hpp"
#include "somgen/region_detect.hpp"
#include "somgen/rng.hpp"
#include "somgen/voronoi.hpp"
#include "somgen/zero_crossings.hpp"

using namespace somgen;

TEST_CASE("palette and per-class region counts") {
    const std::vector<int> palette = VoronoiParams::palette();
    REQUIRE(palette.size() == 128);
    CHECK(palette.front() == 0);
    CHECK(palette.back() == 254);
    for (std::size_t i = 1; i < palette.size(); ++i) {
        CHECK(palette[i] - palette[i - 1] == 2);
    }
    CHECK(VoronoiParams::regions_for_class(1) == 12);
    CHECK(VoronoiParams::regions_for_class(8) == 96);
    CHECK_THROWS(VoronoiParams::regions_for_class(0));
    CHECK_THROWS(VoronoiParams::regions_for_class(9));
}

TEST_CASE("generation: full partition, palette shades, deterministic") {
    for (const int cls : {1, 4, 8}) {
        RngStream rng(derive_stream_seed(31, static_cast<std::uint64_t>(cls)));
        const VoronoiRealization real = generate_voronoi(cls, rng);
        const int n = VoronoiParams::regions_for_class(cls);
        REQUIRE(real.map.region_count == n);
        REQUIRE(static_cast<int>(real.map.regions.size()) == n);

        // Every pixel carries a label in 1..n and areas add up to the image.
        std::vector<int> areas(static_cast<std::size_t>(n) + 1, 0);
        for (const std::int32_t lbl : real.map.labels) {
            REQUIRE(lbl >= 1);
            REQUIRE(lbl <= n);
            ++areas[static_cast<std::size_t>(lbl)];
        }
        long total = 0;
        std::set<int> shades;
        const std::vector<int> palette = VoronoiParams::palette();
        for (const RegionRecord& r : real.map.regions) {
            CHECK(r.area == areas[static_cast<std::size_t>(r.label)]);
            CHECK(r.area > 0);
            total += r.area;
            shades.insert(r.shade);
            CHECK(std::binary_search(palette.begin(), palette.end(), r.shade));
        }
        CHECK(total == 256 * 256);
        CHECK(static_cast<int>(shades.size()) == n); // distinct shades

        // The image is the shade map.
        for (std::size_t i = 0; i < real.map.labels.size(); ++i) {
            const RegionRecord& r =
                real.map.regions[static_cast<std::size_t>(real.map.labels[i]) - 1];
            CHECK(static_cast<int>(real.image.pixels[i]) == r.shade);
        }

        RngStream rng2(derive_stream_seed(31, static_cast<std::uint64_t>(cls)));
        const VoronoiRealization again = generate_voronoi(cls, rng2);
        CHECK(again.image.pixels == real.image.pixels);
        CHECK(again.map.labels == real.map.labels);
    }
}

TEST_CASE("ground-truth area/shade correlation is exactly one") {
    for (const int cls : {1, 2, 8}) {
        for (int seed = 0; seed < 4; ++seed) {
            RngStream rng(derive_stream_seed(37, static_cast<std::uint64_t>(cls * 16 + seed)));
            const VoronoiRealization real = generate_voronoi(cls, rng);
            CHECK(ground_truth_area_shade_rho(real.map) == 1.0);
        }
    }
}

TEST_CASE("dither moves every pixel by one with clamping") {
    GrayImage img;
    img.width = 16;
    img.height = 16;
    img.pixels.resize(256);
    for (int i = 0; i < 256; ++i) img.pixels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    RngStream rng(derive_stream_seed(41, 0));
    const GrayImage out = dither_image(img, rng);
    bool any_up = false;
    bool any_down = false;
    for (int i = 0; i < 256; ++i) {
        const int d = static_cast<int>(out.pixels[static_cast<std::size_t>(i)]) - i;
        if (i == 0) {
            CHECK((d == 0 || d == 1)); // -1 clamps at 0
        } else if (i == 255) {
            CHECK((d == 0 || d == -1)); // +1 clamps at 255
        } else {
            CHECK(std::abs(d) == 1);
        }
        any_up = any_up || d == 1;
        any_down = any_down || d == -1;
    }
    CHECK(any_up);
    CHECK(any_down);
}

TEST_CASE("constant image detects as a single region") {
    GrayImage img;
    img.width = 256;
    img.height = 256;
    img.pixels.assign(256 * 256, 160);
    const RegionMap map = detect_regions(img);
    REQUIRE(map.region_count == 1);
    CHECK(map.regions[0].area == 256 * 256);
    CHECK(map.regions[0].shade == 160);
    for (const std::int32_t lbl : map.labels) CHECK(lbl == 1);
}

TEST_CASE("two half planes detect as two regions with their median shades") {
    GrayImage img;
    img.width = 256;
    img.height = 256;
    img.pixels.resize(256 * 256);
    for (int y = 0; y < 256; ++y) {
        for (int x = 0; x < 256; ++x) {
            img.pixels[static_cast<std::size_t>(y) * 256 + x] = x < 128 ? 64 : 192;
        }
    }
    const RegionMap map = detect_regions(img);
    REQUIRE(map.region_count == 2);
    std::vector<int> shades;
    long total = 0;
    for (const RegionRecord& r : map.regions) {
        shades.push_back(r.shade);
        total += r.area;
        // The split runs along the shared boundary; both halves stay near 50%.
        CHECK(r.area > 30000);
    }
    std::sort(shades.begin(), shades.end());
    CHECK(shades[0] == 64);
    CHECK(shades[1] == 192);
    CHECK(total == 256 * 256);
}

TEST_CASE("hessian response is flat on constants and peaks on an edge") {
    GrayImage flat;
    flat.width = 64;
    flat.height = 64;
    flat.pixels.assign(64 * 64, 90);
    const FloatImage r0 = hessian_boundary_response(flat, 1.5);
    for (const double v : r0.pixels) CHECK(v == doctest::Approx(0.0).epsilon(1e-9));

    GrayImage edge;
    edge.width = 64;
    edge.height = 64;
    edge.pixels.resize(64 * 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            edge.pixels[static_cast<std::size_t>(y) * 64 + x] = x < 32 ? 100 : 180;
        }
    }
    const FloatImage r1 = hessian_boundary_response(edge, 1.5);
    double interior_max = 0.0;
    double near_edge_max = 0.0;
    for (int y = 16; y < 48; ++y) {
        for (int x = 8; x < 56; ++x) {
            const double v = r1.pixels[static_cast<std::size_t>(y) * 64 + x];
            if (std::abs(x - 32) <= 3) {
                near_edge_max = std::max(near_edge_max, v);
            } else if (std::abs(x - 32) >= 10) {
                interior_max = std::max(interior_max, v);
            }
        }
    }
    CHECK(near_edge_max > 1.0);
    CHECK(interior_max < 1e-6);
}

TEST_CASE("count-to-class bins: edge counts take the lower class") {
    const std::vector<double> means = {12, 24, 36, 48, 60, 72, 84, 96};
    const std::vector<double> edges = calibrate_count_bins(means);
    REQUIRE(edges.size() == 7);
    CHECK(edges[0] == doctest::Approx(18.0));
    CHECK(edges[6] == doctest::Approx(90.0));

    CHECK(class_from_count(1, edges) == 1);
    CHECK(class_from_count(12, edges) == 1);
    CHECK(class_from_count(18, edges) == 1); // exactly on the edge
    CHECK(class_from_count(19, edges) == 2);
    CHECK(class_from_count(90, edges) == 7);
    CHECK(class_from_count(91, edges) == 8);
    CHECK(class_from_count(500, edges) == 8);

    CHECK_THROWS(calibrate_count_bins({12, 12, 36, 48, 60, 72, 84, 96}));
    CHECK_THROWS(calibrate_count_bins({12, 24}));
}

TEST_CASE("detection round trip recovers counts and area-shade ordering") {
    for (const int cls : {1, 3}) {
        const int truth = VoronoiParams::regions_for_class(cls);
        for (int i = 0; i < 5; ++i) {
            RngStream rng(derive_stream_seed(47, static_cast<std::uint64_t>(cls * 8 + i)));
            const VoronoiRealization real = generate_voronoi(cls, rng);
            const RegionMap rec = detect_regions(real.image);
            CHECK(std::abs(rec.region_count - truth) <= 1);

            std::vector<double> areas, shades;
            for (const RegionRecord& r : rec.regions) {
                areas.push_back(r.area);
                shades.push_back(r.shade);
            }
            const SpearmanResult rho = spearman_rho(areas, shades);
            REQUIRE(rho.defined);
            CHECK(rho.rho > 0.9);
        }
    }
}

TEST_CASE("zero crossings: piecewise-constant images are silent, dithered ones loud") {
    RngStream rng(derive_stream_seed(43, 5));
    const VoronoiRealization real = generate_voronoi(4, rng);
    const ZeroCrossingResult clean = laplacian_zero_crossings(real.image);
    CHECK(clean.interior_pixels > 20000);
    CHECK(clean.interior_density < 0.01);

    const GrayImage noisy = dither_image(real.image, rng);
    const ZeroCrossingResult dirty = laplacian_zero_crossings(noisy);
    CHECK(dirty.interior_density > 0.2);
}
