#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace somgen {

inline constexpr int kRealizationSize = 256;

/// 8-bit grayscale raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("GrayImage: non-positive dimensions");
    }

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return pixels.size(); }

    bool operator==(const GrayImage& other) const = default;
};

/// Double-precision raster used for accumulation and filtering scratch.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    FloatImage() = default;
    FloatImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("FloatImage: non-positive dimensions");
    }

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::size_t size() const { return pixels.size(); }
};

/// Non-owning view of one square tile of a GrayImage.
struct TileView {
    const GrayImage* image = nullptr;
    int x0 = 0;
    int y0 = 0;
    int size = 0;

    std::uint8_t at(int dx, int dy) const { return image->at(x0 + dx, y0 + dy); }

    double mean() const {
        std::uint64_t sum = 0;
        for (int dy = 0; dy < size; ++dy)
            for (int dx = 0; dx < size; ++dx) sum += at(dx, dy);
        return static_cast<double>(sum) / (static_cast<double>(size) * size);
    }

    std::vector<std::uint8_t> values() const {
        std::vector<std::uint8_t> out;
        out.reserve(static_cast<std::size_t>(size) * size);
        for (int dy = 0; dy < size; ++dy)
            for (int dx = 0; dx < size; ++dx) out.push_back(at(dx, dy));
        return out;
    }
};

/// Row-major grid of tile views covering the image exactly once.
struct TileGrid {
    int tile_size = 0;
    int tiles_x = 0;
    int tiles_y = 0;
    std::vector<TileView> tiles;

    const TileView& tile(int tx, int ty) const { return tiles[static_cast<std::size_t>(ty) * tiles_x + tx]; }
};

/// Partition an image into square tiles; tile_size must divide both dimensions.
TileGrid split_tiles(const GrayImage& image, int tile_size);

} // namespace somgen
