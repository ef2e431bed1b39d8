#include "somgen/region_detect.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "somgen/filters.hpp"

namespace somgen {

namespace {

using Mask = std::vector<std::uint8_t>;

// One 3x3 erosion pass; pixels outside the frame count as mask so boundary
// bands touching the frame edge are not eaten from that side.
Mask erode3x3(const Mask& mask, int w, int h) {
    Mask out(mask.size(), 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask[static_cast<std::size_t>(y) * w + x]) continue;
            bool keep = true;
            for (int dy = -1; dy <= 1 && keep; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx;
                    const int yy = y + dy;
                    if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                    if (!mask[static_cast<std::size_t>(yy) * w + xx]) {
                        keep = false;
                        break;
                    }
                }
            }
            if (keep) out[static_cast<std::size_t>(y) * w + x] = 1;
        }
    }
    return out;
}

// Zhang-Suen thinning to a 1-pixel-wide, 8-connected skeleton. Out-of-frame
// counts as mask, like the erosion above: a separating line that meets the
// frame must keep touching it, or the regions it divides leak into each other
// around its receded tip.
void skeletonize(Mask& mask, int w, int h) {
    auto at = [&](int x, int y) -> std::uint8_t {
        if (x < 0 || y < 0 || x >= w || y >= h) return 1;
        return mask[static_cast<std::size_t>(y) * w + x];
    };
    std::vector<std::size_t> kill;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            kill.clear();
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (!at(x, y)) continue;
                    const std::uint8_t p2 = at(x, y - 1), p3 = at(x + 1, y - 1),
                                       p4 = at(x + 1, y), p5 = at(x + 1, y + 1),
                                       p6 = at(x, y + 1), p7 = at(x - 1, y + 1),
                                       p8 = at(x - 1, y), p9 = at(x - 1, y - 1);
                    const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    if (b < 2 || b > 6) continue;
                    int a = 0;
                    const std::uint8_t seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
                    for (int i = 0; i < 8; ++i)
                        if (!seq[i] && seq[i + 1]) ++a;
                    if (a != 1) continue;
                    if (phase == 0) {
                        if (p2 * p4 * p6 != 0) continue;
                        if (p4 * p6 * p8 != 0) continue;
                    } else {
                        if (p2 * p4 * p8 != 0) continue;
                        if (p2 * p6 * p8 != 0) continue;
                    }
                    kill.push_back(static_cast<std::size_t>(y) * w + x);
                }
            }
            if (!kill.empty()) changed = true;
            for (const std::size_t k : kill) mask[k] = 0;
        }
    }
}

} // namespace

FloatImage hessian_boundary_response(const GrayImage& image, double sigma) {
    const FloatImage f = to_float(image);
    const std::vector<double> g0 = gaussian_kernel(sigma, 0);
    const std::vector<double> g1 = gaussian_kernel(sigma, 1);
    const std::vector<double> g2 = gaussian_kernel(sigma, 2);
    const FloatImage ixx = separable_filter(f, g2, g0);
    const FloatImage iyy = separable_filter(f, g0, g2);
    const FloatImage ixy = separable_filter(f, g1, g1);

    FloatImage out = ixx;
    for (std::size_t p = 0; p < out.pixels.size(); ++p) {
        const double half_trace = 0.5 * (ixx.pixels[p] + iyy.pixels[p]);
        const double half_diff = 0.5 * (ixx.pixels[p] - iyy.pixels[p]);
        const double root = std::sqrt(half_diff * half_diff + ixy.pixels[p] * ixy.pixels[p]);
        // max(|ht + root|, |ht - root|) with root >= 0.
        out.pixels[p] = std::fabs(half_trace) + root;
    }
    return out;
}

RegionMap detect_regions(const GrayImage& image, const RegionDetectConfig& config) {
    const int w = image.width;
    const int h = image.height;
    const std::size_t npix = image.pixels.size();
    const FloatImage response = hessian_boundary_response(image, config.hessian_sigma);

    double threshold = config.hessian_threshold;
    if (config.threshold_mode == RegionDetectConfig::ThresholdMode::percentile) {
        std::vector<double> values = response.pixels;
        const double h_idx =
            static_cast<double>(values.size() - 1) * config.threshold_percentile;
        auto nth = values.begin() + static_cast<std::ptrdiff_t>(h_idx);
        std::nth_element(values.begin(), nth, values.end());
        threshold = *nth;
    }

    Mask boundary(npix, 0);
    for (std::size_t p = 0; p < npix; ++p) {
        boundary[p] = response.pixels[p] > threshold ? 1 : 0;
    }
    for (int i = 0; i < config.erosion_iterations; ++i) boundary = erode3x3(boundary, w, h);
    skeletonize(boundary, w, h);

    // 4-connected flood fill over non-skeleton pixels.
    RegionMap map;
    map.width = w;
    map.height = h;
    map.labels.assign(npix, 0);
    std::vector<std::int32_t> provisional(npix, 0);
    std::int32_t next_label = 0;
    std::vector<std::size_t> stack;
    std::vector<int> areas; // 1-based label -> area
    areas.push_back(0);
    for (std::size_t start = 0; start < npix; ++start) {
        if (boundary[start] || provisional[start] != 0) continue;
        ++next_label;
        areas.push_back(0);
        stack.push_back(start);
        provisional[start] = next_label;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++areas[static_cast<std::size_t>(next_label)];
            const int x = static_cast<int>(p % static_cast<std::size_t>(w));
            const int y = static_cast<int>(p / static_cast<std::size_t>(w));
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (boundary[q] || provisional[q] != 0) continue;
                provisional[q] = next_label;
                stack.push_back(q);
            }
        }
    }

    // Tiny provisional regions (skeleton loop debris) dissolve back into the
    // unassigned pool and get claimed by the watershed below.
    std::vector<std::int32_t> relabel(areas.size(), 0);
    std::int32_t kept = 0;
    for (std::int32_t l = 1; l <= next_label; ++l) {
        if (areas[static_cast<std::size_t>(l)] >= config.min_region_area) {
            relabel[static_cast<std::size_t>(l)] = ++kept;
        }
    }
    if (kept == 0 && next_label > 0) {
        // Degenerate fallback: keep the largest region so the map is non-empty.
        const std::int32_t biggest = static_cast<std::int32_t>(
            std::max_element(areas.begin() + 1, areas.end()) - areas.begin());
        relabel[static_cast<std::size_t>(biggest)] = ++kept;
    }
    for (std::size_t p = 0; p < npix; ++p) {
        map.labels[p] = provisional[p] > 0 ? relabel[static_cast<std::size_t>(provisional[p])] : 0;
    }

    // Watershed refinement: flood unassigned pixels from the basins in order
    // of ascending boundary response; deterministic (response, y, x) ordering.
    using Item = std::tuple<double, int, int>; // (priority, y, x)
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    auto push_if_unassigned_neighbor = [&](int x, int y) {
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        for (int k = 0; k < 4; ++k) {
            if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
            const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
            if (map.labels[q] == 0) {
                queue.emplace(response.pixels[q], ny[k], nx[k]);
            }
        }
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (map.labels[static_cast<std::size_t>(y) * w + x] != 0)
                push_if_unassigned_neighbor(x, y);

    while (!queue.empty()) {
        const auto [pri, y, x] = queue.top();
        queue.pop();
        const std::size_t p = static_cast<std::size_t>(y) * w + x;
        if (map.labels[p] != 0) continue;
        // Adopt the first labeled 4-neighbor (lowest response reached first).
        const int nx[4] = {x - 1, x + 1, x, x};
        const int ny[4] = {y, y, y - 1, y + 1};
        std::int32_t adopt = 0;
        for (int k = 0; k < 4; ++k) {
            if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
            const std::int32_t l = map.labels[static_cast<std::size_t>(ny[k]) * w + nx[k]];
            if (l != 0) {
                adopt = l;
                break;
            }
        }
        if (adopt == 0) continue; // re-queued later via a neighbor
        map.labels[p] = adopt;
        push_if_unassigned_neighbor(x, y);
    }

    // All-boundary degenerate input: nothing labeled, call it one region.
    if (kept == 0) {
        std::fill(map.labels.begin(), map.labels.end(), 1);
        kept = 1;
    }

    map.region_count = kept;
    map.regions.assign(static_cast<std::size_t>(kept), RegionRecord{});
    std::vector<std::vector<std::uint32_t>> shade_hist(
        static_cast<std::size_t>(kept), std::vector<std::uint32_t>(256, 0));
    for (std::size_t p = 0; p < npix; ++p) {
        RegionRecord& r = map.regions[static_cast<std::size_t>(map.labels[p] - 1)];
        r.label = map.labels[p];
        ++r.area;
        ++shade_hist[static_cast<std::size_t>(map.labels[p] - 1)][image.pixels[p]];
    }
    for (std::int32_t l = 0; l < kept; ++l) {
        const auto& hist = shade_hist[static_cast<std::size_t>(l)];
        const int target = (map.regions[static_cast<std::size_t>(l)].area + 1) / 2;
        int seen = 0;
        for (int v = 0; v < 256; ++v) {
            seen += static_cast<int>(hist[static_cast<std::size_t>(v)]);
            if (seen >= target) {
                map.regions[static_cast<std::size_t>(l)].shade = v;
                break;
            }
        }
    }
    return map;
}

int class_from_count(int region_count, const std::vector<double>& bin_edges) {
    if (bin_edges.empty()) throw std::invalid_argument("class bins are uncalibrated");
    int cls = 1;
    for (const double edge : bin_edges) {
        if (static_cast<double>(region_count) > edge) ++cls;
    }
    return cls;
}

std::vector<double> calibrate_count_bins(const std::vector<double>& mean_count_per_class) {
    if (static_cast<int>(mean_count_per_class.size()) != VoronoiParams::kClasses) {
        throw std::invalid_argument("count-bin calibration needs one mean per class");
    }
    std::vector<double> edges;
    for (std::size_t k = 0; k + 1 < mean_count_per_class.size(); ++k) {
        if (mean_count_per_class[k + 1] <= mean_count_per_class[k]) {
            throw std::invalid_argument("class mean counts must increase with class");
        }
        edges.push_back(0.5 * (mean_count_per_class[k] + mean_count_per_class[k + 1]));
    }
    return edges;
}

} // namespace somgen
