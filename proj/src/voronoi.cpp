#include "somgen/voronoi.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "somgen/rank_stats.hpp"

namespace somgen {

namespace {

constexpr int kImageSize = 256;

} // namespace

int VoronoiParams::regions_for_class(int class_id) {
    if (class_id < 1 || class_id > kClasses) {
        throw std::out_of_range("voronoi class out of range");
    }
    return kRegionsPerClass * class_id;
}

std::vector<int> VoronoiParams::palette() {
    std::vector<int> shades(128);
    for (int i = 0; i < 128; ++i) shades[static_cast<std::size_t>(i)] = 2 * i;
    return shades;
}

VoronoiRealization generate_voronoi(int class_id, RngStream& rng) {
    const int n = VoronoiParams::regions_for_class(class_id);

    // Distinct integer sites, redrawn on collision.
    std::vector<int> site_x(static_cast<std::size_t>(n));
    std::vector<int> site_y(static_cast<std::size_t>(n));
    std::unordered_set<int> taken;
    for (int i = 0; i < n; ++i) {
        int x, y;
        do {
            x = static_cast<int>(rng.uniform_below(kImageSize));
            y = static_cast<int>(rng.uniform_below(kImageSize));
        } while (!taken.insert(y * kImageSize + x).second);
        site_x[static_cast<std::size_t>(i)] = x;
        site_y[static_cast<std::size_t>(i)] = y;
    }

    VoronoiRealization out;
    out.map.width = kImageSize;
    out.map.height = kImageSize;
    out.map.labels.resize(static_cast<std::size_t>(kImageSize) * kImageSize);
    out.map.region_count = n;
    out.map.regions.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.map.regions[static_cast<std::size_t>(i)].label = i + 1;

    for (int y = 0; y < kImageSize; ++y) {
        for (int x = 0; x < kImageSize; ++x) {
            int best = 0;
            int best_d = std::numeric_limits<int>::max();
            for (int i = 0; i < n; ++i) {
                const int dx = x - site_x[static_cast<std::size_t>(i)];
                const int dy = y - site_y[static_cast<std::size_t>(i)];
                const int d = dx * dx + dy * dy;
                if (d < best_d) { // strict: equidistant pixels keep the lower site
                    best_d = d;
                    best = i;
                }
            }
            out.map.labels[static_cast<std::size_t>(y) * kImageSize + x] = best + 1;
            ++out.map.regions[static_cast<std::size_t>(best)].area;
        }
    }

    // N distinct shades sorted ascending, matched to ascending (area, site) rank.
    const std::vector<int> palette = VoronoiParams::palette();
    std::vector<int> idx(palette.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> shades(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Partial Fisher-Yates draw without replacement from the palette.
        const std::size_t j =
            static_cast<std::size_t>(i) +
            static_cast<std::size_t>(rng.uniform_below(palette.size() - static_cast<std::size_t>(i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
        shades[static_cast<std::size_t>(i)] = palette[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    std::sort(shades.begin(), shades.end());

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int aa = out.map.regions[static_cast<std::size_t>(a)].area;
        const int ab = out.map.regions[static_cast<std::size_t>(b)].area;
        if (aa != ab) return aa < ab;
        return a < b;
    });
    for (int rank = 0; rank < n; ++rank) {
        out.map.regions[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])].shade =
            shades[static_cast<std::size_t>(rank)];
    }

    out.image.width = kImageSize;
    out.image.height = kImageSize;
    out.image.pixels.resize(out.map.labels.size());
    for (std::size_t p = 0; p < out.map.labels.size(); ++p) {
        out.image.pixels[p] = static_cast<std::uint8_t>(
            out.map.regions[static_cast<std::size_t>(out.map.labels[p] - 1)].shade);
    }
    return out;
}

double ground_truth_area_shade_rho(const RegionMap& map) {
    const std::size_t n = map.regions.size();
    if (n < 2) throw std::invalid_argument("need at least two regions for a correlation");
    // Rank areas along the construction's own order (area, then label) so the
    // monotone-assignment oracle stays exact under pixel-count ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (map.regions[a].area != map.regions[b].area)
            return map.regions[a].area < map.regions[b].area;
        return map.regions[a].label < map.regions[b].label;
    });
    std::vector<double> area_rank(n, 0.0);
    for (std::size_t rank = 0; rank < n; ++rank) {
        area_rank[order[rank]] = static_cast<double>(rank + 1);
    }
    std::vector<double> shade(n);
    for (std::size_t i = 0; i < n; ++i) shade[i] = static_cast<double>(map.regions[i].shade);
    return spearman_rho(area_rank, shade).rho;
}

GrayImage dither_image(const GrayImage& image, RngStream& rng) {
    GrayImage out = image;
    for (auto& px : out.pixels) {
        const int delta = rng.uniform_below(2) == 0 ? -1 : 1;
        const int v = std::clamp(static_cast<int>(px) + delta, 0, 255);
        px = static_cast<std::uint8_t>(v);
    }
    return out;
}

} // namespace somgen
