#pragma once

// Eight-class Voronoi SOM: nearest-site region maps with area-monotone
// shading from a fixed 128-entry palette.

#include <cstdint>
#include <vector>

#include "somgen/gray_image.hpp"
#include "somgen/rng.hpp"

namespace somgen {

struct VoronoiParams {
    static constexpr int kClasses = 8;
    static constexpr int kRegionsPerClass = 12; // class k has 12*k regions

    static int regions_for_class(int class_id);
    /// The 128 equidistant shades {0, 2, 4, ..., 254}.
    static std::vector<int> palette();
};

struct RegionRecord {
    std::int32_t label = 0;
    int area = 0;  // pixels
    int shade = 0; // constant shade for ground truth, median for recovered maps
};

struct RegionMap {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels; // row-major; 0 = boundary/unassigned
    int region_count = 0;
    std::vector<RegionRecord> regions;
};

struct VoronoiRealization {
    GrayImage image;
    RegionMap map;
};

/// N = 12*class_id distinct sites uniform over the pixel grid; each pixel
/// joins its nearest site (Euclidean, ties to the lowest site index); N
/// distinct palette shades are sorted and assigned in ascending area rank
/// (area ties broken by site index).
VoronoiRealization generate_voronoi(int class_id, RngStream& rng);

/// (area, shade) rank correlation of a ground-truth map. Because shades are
/// assigned along the construction's own (area, site index) order, this is
/// exactly 1 by construction; area ranks reuse that order so the oracle holds
/// even when two regions tie in pixel count.
double ground_truth_area_shade_rho(const RegionMap& map);

// Degradation used when probing texture sensitivity: every pixel moves by
// +-1 (fair coin), clamped to the valid intensity range.
GrayImage dither_image(const GrayImage& image, RngStream& rng);

} // namespace somgen
