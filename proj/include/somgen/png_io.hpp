#pragma once

// PNG I/O. Realizations are stored as 8-bit single-channel PNGs, written with
// fixed encoder settings so that regenerating an ensemble is byte-identical.
// Region label maps use 16-bit grayscale.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "somgen/gray_image.hpp"

namespace somgen {

struct ExpectedSize {
    int width = 0;
    int height = 0;
};

/// Decode an 8-bit grayscale PNG. Throws on unreadable files, non-grayscale or
/// non-8-bit payloads, and dimension mismatch when expected is given.
GrayImage load_image(const std::filesystem::path& path,
                     std::optional<ExpectedSize> expected = std::nullopt);

/// Encode as 8-bit grayscale PNG, no interlacing, filter type None.
void save_image(const GrayImage& image, const std::filesystem::path& path);

/// 16-bit grayscale PNG for integer label rasters (values must fit in 16 bits).
void save_label_png16(const std::vector<std::int32_t>& labels, int width, int height,
                      const std::filesystem::path& path);

std::vector<std::int32_t> load_label_png16(const std::filesystem::path& path, int& width, int& height);

} // namespace somgen
