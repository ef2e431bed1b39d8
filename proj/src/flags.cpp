#include "somgen/flags.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "somgen/moran.hpp"

namespace somgen {

namespace {

constexpr int kImageSize = 256;

} // namespace

GrayImage generate_flags(int class_id, RngStream& rng, const FlagTemplateSet& templates,
                         const FlagsModel& model) {
    const FlagTemplate& tpl = templates.for_class(class_id);
    const int ts = model.tile_size;
    const int grid = kImageSize / ts;

    // Pixel slot lists per population, in row-major order of tiles then pixels.
    std::vector<std::uint32_t> fg_slots;
    std::vector<std::uint32_t> bg_slots;
    fg_slots.reserve(80 * 256);
    bg_slots.reserve(176 * 256);
    for (int tr = 0; tr < grid; ++tr) {
        for (int tc = 0; tc < grid; ++tc) {
            auto& slots = tpl.fg(tr, tc) ? fg_slots : bg_slots;
            for (int y = 0; y < ts; ++y) {
                for (int x = 0; x < ts; ++x) {
                    slots.push_back(static_cast<std::uint32_t>((tr * ts + y) * kImageSize +
                                                               tc * ts + x));
                }
            }
        }
    }

    auto draw = [&](const BetaSpec& spec, std::size_t n) {
        std::vector<std::uint8_t> values(n);
        for (auto& v : values) v = static_cast<std::uint8_t>(sample_scaled_beta(spec, rng));
        return values;
    };
    std::vector<std::uint8_t> fg_values = draw(model.foreground, fg_slots.size());
    std::vector<std::uint8_t> bg_values = draw(model.background, bg_slots.size());
    // Uniform random arrangement within each population's own squares.
    rng.shuffle(fg_values);
    rng.shuffle(bg_values);

    GrayImage image;
    image.width = kImageSize;
    image.height = kImageSize;
    image.pixels.resize(static_cast<std::size_t>(kImageSize) * kImageSize);
    for (std::size_t i = 0; i < fg_slots.size(); ++i) image.pixels[fg_slots[i]] = fg_values[i];
    for (std::size_t i = 0; i < bg_slots.size(); ++i) image.pixels[bg_slots[i]] = bg_values[i];
    return image;
}

FlagsRecovery classify_flags(const GrayImage& image, const FlagTemplateSet& templates,
                             const FlagsModel& model) {
    if (image.width != kImageSize || image.height != kImageSize) {
        throw std::invalid_argument("flags classifier expects 256x256 images");
    }
    const TileGrid grid = split_tiles(image, model.tile_size);

    FlagsRecovery rec;
    for (int tr = 0; tr < grid.tiles_y; ++tr) {
        for (int tc = 0; tc < grid.tiles_x; ++tc) {
            if (grid.tile(tc, tr).mean() > model.tile_mean_threshold) {
                rec.recovered_foreground.set(static_cast<std::size_t>(tr * 16 + tc));
            }
        }
    }

    double best = 2.0; // MAE is at most 1
    for (const FlagTemplate& tpl : templates.all()) {
        const double mae =
            static_cast<double>((rec.recovered_foreground ^ tpl.foreground).count()) / 256.0;
        if (mae < best) { // strict: ties keep the lowest class id
            best = mae;
            rec.class_id = tpl.class_id;
        }
    }
    rec.template_mae = best;
    rec.perfect_match =
        rec.recovered_foreground == templates.for_class(rec.class_id).foreground;
    return rec;
}

PixelSplit split_pixels(const GrayImage& image, const FlagsRecovery& recovery,
                        const FlagsModel& model) {
    PixelSplit split;
    split.foreground = make_histogram(model.foreground);
    split.background = make_histogram(model.background);
    const TileGrid grid = split_tiles(image, model.tile_size);
    for (int tr = 0; tr < grid.tiles_y; ++tr) {
        for (int tc = 0; tc < grid.tiles_x; ++tc) {
            const bool fg = recovery.recovered_foreground.test(static_cast<std::size_t>(tr * 16 + tc));
            accumulate_tile(fg ? split.foreground : split.background, grid.tile(tc, tr));
        }
    }
    return split;
}

IntensityValidation validate_intensities(const GrayImage& image, const FlagsRecovery& recovery,
                                         double fg_tolerance, double bg_tolerance,
                                         const FlagsModel& model) {
    const PixelSplit split = split_pixels(image, recovery, model);
    IntensityValidation v;
    // An empty population cannot match its law; report it as an unconditional
    // failure rather than throwing mid-ensemble.
    v.fg_statistic = split.foreground.total() > 0
                         ? chi_square_gof(split.foreground, model.foreground).statistic
                         : std::numeric_limits<double>::infinity();
    v.bg_statistic = split.background.total() > 0
                         ? chi_square_gof(split.background, model.background).statistic
                         : std::numeric_limits<double>::infinity();
    v.fg_pass = v.fg_statistic < fg_tolerance;
    v.bg_pass = v.bg_statistic < bg_tolerance;
    return v;
}

RandomnessValidation validate_randomness(const GrayImage& image, const RandomnessConfig& config,
                                         int tile_size) {
    const TileGrid grid = split_tiles(image, tile_size);
    const double zcrit = normal_quantile(1.0 - config.per_tile_alpha / 2.0);
    RandomnessValidation v;
    for (const TileView& tile : grid.tiles) {
        const MoranResult r = moran_i(tile);
        if (r.degenerate) {
            ++v.degenerate_tiles;
        } else if (std::fabs(r.z) > zcrit) {
            ++v.violating_tiles;
        }
    }
    v.pass = v.violating_tiles < config.max_violations;
    return v;
}

PrevalenceSummary class_prevalence(const std::vector<int>& labels, int n_classes) {
    if (labels.empty()) throw std::invalid_argument("class prevalence of empty label list");
    PrevalenceSummary s;
    s.fractions.assign(static_cast<std::size_t>(n_classes), 0.0);
    for (const int c : labels) {
        if (c < 1 || c > n_classes) throw std::invalid_argument("class label out of range");
        s.fractions[static_cast<std::size_t>(c - 1)] += 1.0;
    }
    double mean = 0.0;
    for (double& f : s.fractions) {
        f /= static_cast<double>(labels.size());
        mean += f;
    }
    mean /= n_classes;
    double var = 0.0;
    for (const double f : s.fractions) var += (f - mean) * (f - mean);
    s.stddev = std::sqrt(var / n_classes);
    return s;
}

} // namespace somgen
