#include "somgen/filters.hpp"

#include <cmath>
#include <stdexcept>

namespace somgen {

std::vector<double> gaussian_kernel(double sigma, int order) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    const double s2 = sigma * sigma;
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double g = std::exp(-0.5 * i * i / s2);
        norm += g;
        kernel[static_cast<std::size_t>(i + radius)] = g;
    }
    for (double& k : kernel) k /= norm;

    if (order == 1) {
        // d/dx of the normalized Gaussian: multiply by -x/sigma^2.
        for (int i = -radius; i <= radius; ++i) {
            kernel[static_cast<std::size_t>(i + radius)] *= -static_cast<double>(i) / s2;
        }
    } else if (order == 2) {
        // d2/dx2: multiply by (x^2 - sigma^2)/sigma^4, then remove the small
        // discretization DC so constant inputs map to exactly zero.
        double sum = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            double& k = kernel[static_cast<std::size_t>(i + radius)];
            k *= (static_cast<double>(i) * i - s2) / (s2 * s2);
            sum += k;
        }
        const double correction = sum / static_cast<double>(kernel.size());
        for (double& k : kernel) k -= correction;
    } else if (order != 0) {
        throw std::invalid_argument("gaussian kernel order must be 0, 1 or 2");
    }
    return kernel;
}

FloatImage to_float(const GrayImage& image) {
    FloatImage f;
    f.width = image.width;
    f.height = image.height;
    f.pixels.assign(image.pixels.begin(), image.pixels.end());
    return f;
}

namespace {

void convolve_rows(const FloatImage& in, const std::vector<double>& kernel, FloatImage& out) {
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int y = 0; y < in.height; ++y) {
        const double* row = in.pixels.data() + static_cast<std::size_t>(y) * in.width;
        double* orow = out.pixels.data() + static_cast<std::size_t>(y) * in.width;
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int xx = x + k;
                if (xx < 0) xx = 0;
                if (xx >= in.width) xx = in.width - 1;
                acc += kernel[static_cast<std::size_t>(k + radius)] * row[xx];
            }
            orow[x] = acc;
        }
    }
}

void convolve_cols(const FloatImage& in, const std::vector<double>& kernel, FloatImage& out) {
    const int radius = static_cast<int>(kernel.size() / 2);
    for (int x = 0; x < in.width; ++x) {
        for (int y = 0; y < in.height; ++y) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                int yy = y + k;
                if (yy < 0) yy = 0;
                if (yy >= in.height) yy = in.height - 1;
                acc += kernel[static_cast<std::size_t>(k + radius)] *
                       in.pixels[static_cast<std::size_t>(yy) * in.width + x];
            }
            out.pixels[static_cast<std::size_t>(y) * in.width + x] = acc;
        }
    }
}

} // namespace

FloatImage separable_filter(const FloatImage& input, const std::vector<double>& kernel_x,
                            const std::vector<double>& kernel_y) {
    FloatImage tmp = input;
    convolve_rows(input, kernel_x, tmp);
    FloatImage out = input;
    convolve_cols(tmp, kernel_y, out);
    return out;
}

FloatImage gaussian_smooth(const FloatImage& input, double sigma) {
    const std::vector<double> g = gaussian_kernel(sigma, 0);
    return separable_filter(input, g, g);
}

} // namespace somgen
