#pragma once

// Moran's I spatial autocorrelation on square tiles with rook adjacency,
// with the randomization-null mean/variance for a two-sided z-test.

#include "somgen/gray_image.hpp"

namespace somgen {

struct MoranResult {
    double I = 0.0;
    double expected = 0.0; // -1/(n-1) under the null
    double variance = 0.0; // randomization (permutation) null
    double z = 0.0;
    bool degenerate = false; // constant tile: I undefined, test cannot reject
};

/// Moran's I over a tile using binary rook weights (4-neighborhood inside the
/// tile, no wraparound).
MoranResult moran_i(const TileView& tile);

/// Convenience: fraction of tiles whose |z| exceeds the two-sided critical
/// value for `alpha`. Degenerate tiles never count as violations.
double moran_violation_rate(const TileGrid& grid, double alpha);

/// Two-sided critical z for a given significance level.
double normal_quantile(double p);

} // namespace somgen
