#include "somgen/zero_crossings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "somgen/filters.hpp"

namespace somgen {

namespace {

// 4-neighbour Laplacian with clamp-to-edge sampling.
FloatImage four_neighbour_laplacian(const FloatImage& f) {
    FloatImage lap(f.width, f.height);
    auto at = [&](int x, int y) {
        x = std::clamp(x, 0, f.width - 1);
        y = std::clamp(y, 0, f.height - 1);
        return f.pixels[static_cast<std::size_t>(y) * f.width + x];
    };
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const double c = at(x, y);
            lap.pixels[static_cast<std::size_t>(y) * f.width + x] =
                at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1) - 4.0 * c;
        }
    }
    return lap;
}

} // namespace

ZeroCrossingResult laplacian_zero_crossings(const GrayImage& image,
                                            const ZeroCrossingConfig& config) {
    if (config.smooth_sigma <= 0.0 || config.epsilon < 0.0 ||
        config.gradient_threshold < 0.0 || config.boundary_band < 0) {
        throw std::invalid_argument("laplacian_zero_crossings: bad configuration");
    }
    const int w = image.width;
    const int h = image.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    const FloatImage smooth = gaussian_smooth(to_float(image), config.smooth_sigma);
    const FloatImage lap = four_neighbour_laplacian(smooth);

    // A crossing needs a strict sign flip against a 4-neighbour and a jump
    // larger than epsilon, so numerically flat regions stay quiet.
    ZeroCrossingResult result;
    result.crossings.assign(n, 0);
    auto lap_at = [&](int x, int y) { return lap.pixels[static_cast<std::size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double c = lap_at(x, y);
            const int dx[4] = {1, -1, 0, 0};
            const int dy[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int nx = x + dx[k];
                const int ny = y + dy[k];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const double q = lap_at(nx, ny);
                const bool flip = (c > 0.0 && q < 0.0) || (c < 0.0 && q > 0.0);
                if (flip && std::abs(c - q) > config.epsilon) {
                    result.crossings[static_cast<std::size_t>(y) * w + x] = 1;
                    break;
                }
            }
        }
    }

    // Boundary mask: strong smoothed gradient, dilated by the band radius.
    std::vector<std::uint8_t> boundary(n, 0);
    auto sm_at = [&](int x, int y) {
        x = std::clamp(x, 0, w - 1);
        y = std::clamp(y, 0, h - 1);
        return smooth.pixels[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = 0.5 * (sm_at(x + 1, y) - sm_at(x - 1, y));
            const double gy = 0.5 * (sm_at(x, y + 1) - sm_at(x, y - 1));
            if (std::hypot(gx, gy) > config.gradient_threshold) {
                boundary[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }
    std::vector<std::uint8_t> band = boundary;
    for (int pass = 0; pass < config.boundary_band; ++pass) {
        std::vector<std::uint8_t> next = band;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (band[static_cast<std::size_t>(y) * w + x] == 0) continue;
                const int dx[4] = {1, -1, 0, 0};
                const int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + dx[k];
                    const int ny = y + dy[k];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    next[static_cast<std::size_t>(ny) * w + nx] = 1;
                }
            }
        }
        band = std::move(next);
    }

    // Keep clear of the frame: smoothing support plus one pixel.
    const int margin = std::max(2, static_cast<int>(std::ceil(4.0 * config.smooth_sigma)) + 1);

    std::int64_t interior = 0;
    std::int64_t hits = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (x < margin || y < margin || x >= w - margin || y >= h - margin) continue;
            if (band[static_cast<std::size_t>(y) * w + x]) continue;
            ++interior;
            hits += result.crossings[static_cast<std::size_t>(y) * w + x];
        }
    }
    result.interior_pixels = interior;
    result.interior_density = interior > 0 ? static_cast<double>(hits) / static_cast<double>(interior) : 0.0;
    return result;
}

} // namespace somgen
