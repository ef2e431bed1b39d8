#pragma once

// Post-hoc region recovery for Voronoi-style images: Hessian boundary
// response, erosion + skeletonization, flood fill and watershed refinement,
// then per-region area and median shade readout.

#include <vector>

#include "somgen/gray_image.hpp"
#include "somgen/voronoi.hpp"

namespace somgen {

struct RegionDetectConfig {
    // Gaussian-derivative scale for the Hessian. Small scales keep boundary
    // strips narrow (about 5 px at the weakest legal 2-level shade step), so
    // small regions retain enough interior to survive labeling.
    double hessian_sigma = 0.9;

    // Boundary response threshold: either an absolute cutoff on the largest
    // Hessian eigenvalue magnitude or a per-image percentile of it. Absolute
    // is the default because boundary density varies a lot across classes; a
    // fixed percentile over-masks sparse maps and under-masks dense ones. The
    // weakest legal edge peaks near 0.19 at this scale, well above 0.06.
    enum class ThresholdMode { absolute, percentile };
    ThresholdMode threshold_mode = ThresholdMode::absolute;
    double hessian_threshold = 0.06;    // absolute mode
    double threshold_percentile = 0.90; // percentile mode

    int erosion_iterations = 1; // 3x3 erosion passes on the boundary mask
    int min_region_area = 8;    // provisional regions below this dissolve into
                                // the watershed instead of surviving
};

/// Largest-magnitude Hessian eigenvalue per pixel at the given scale.
FloatImage hessian_boundary_response(const GrayImage& image, double sigma);

/// Full pipeline. Labels are 1..region_count with 0 never present in the
/// output (watershed assigns every pixel). Region shade is the median image
/// value over the region's pixels.
RegionMap detect_regions(const GrayImage& image, const RegionDetectConfig& config = {});

/// Class from a recovered region count given ascending bin edges between
/// consecutive classes. A count exactly on an edge takes the lower class;
/// counts beyond the last edge map to the top class.
int class_from_count(int region_count, const std::vector<double>& bin_edges);

/// Midpoints between consecutive class-conditional mean recovered counts;
/// the calibration companion of class_from_count.
std::vector<double> calibrate_count_bins(const std::vector<double>& mean_count_per_class);

} // namespace somgen
