#pragma once

// Laplacian zero-crossing artifact map: high-frequency texture shows up as
// sign flips of the smoothed Laplacian inside nominally flat regions.

#include <vector>

#include "somgen/gray_image.hpp"

namespace somgen {

struct ZeroCrossingConfig {
    double smooth_sigma = 1.0; // Gaussian smoothing before the Laplacian
    // Minimum |Laplacian difference| at a flip. Smoothed +-1 dither produces
    // adjacent-pixel Laplacian jumps of roughly 0.4 sd, so 0.5 keeps the
    // detector responsive to it while numerically flat interiors stay silent.
    double epsilon = 0.5;
    // Smoothed-gradient magnitude marking region boundaries. The weakest
    // legal shade step (2 levels) peaks near 0.62 after sigma-1 smoothing;
    // 0.5 excludes every real boundary without firing inside dithered flats.
    double gradient_threshold = 0.5;
    int boundary_band = 2; // dilation radius of the boundary exclusion band
};

struct ZeroCrossingResult {
    std::vector<std::uint8_t> crossings; // row-major binary map
    double interior_density = 0.0;       // crossing fraction outside boundary bands
    std::int64_t interior_pixels = 0;
};

ZeroCrossingResult laplacian_zero_crossings(const GrayImage& image,
                                            const ZeroCrossingConfig& config = {});

} // namespace somgen
