#pragma once

// Separable Gaussian filtering (plus first/second derivative kernels) used by
// the boundary detector and the zero-crossing artifact map.

#include <vector>

#include "somgen/gray_image.hpp"

namespace somgen {

/// Sampled Gaussian (order 0), its first derivative (order 1) or second
/// derivative (order 2), radius = ceil(4*sigma), L1-normalized for order 0.
std::vector<double> gaussian_kernel(double sigma, int order);

FloatImage to_float(const GrayImage& image);

/// Separable convolution with clamp-to-edge borders; kernel_x runs along rows,
/// kernel_y along columns.
FloatImage separable_filter(const FloatImage& input, const std::vector<double>& kernel_x,
                            const std::vector<double>& kernel_y);

FloatImage gaussian_smooth(const FloatImage& input, double sigma);

} // namespace somgen
