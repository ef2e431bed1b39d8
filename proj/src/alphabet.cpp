#include "somgen/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "somgen/png_io.hpp"

namespace somgen {

namespace {

constexpr char kLetterChars[kLetterCount + 1] = "HKLVWXYZ";

struct Segment {
    double x0, y0, x1, y1;
};

double segment_distance(double px, double py, const Segment& s) {
    const double dx = s.x1 - s.x0;
    const double dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = s.x0 + t * dx;
    const double cy = s.y0 + t * dy;
    return std::hypot(px - cx, py - cy);
}

GrayImage rasterize(const std::vector<Segment>& segments, double half_width) {
    GrayImage glyph;
    glyph.width = kGlyphSize;
    glyph.height = kGlyphSize;
    glyph.pixels.assign(static_cast<std::size_t>(kGlyphSize) * kGlyphSize, 0);
    for (int y = 0; y < kGlyphSize; ++y) {
        for (int x = 0; x < kGlyphSize; ++x) {
            for (const Segment& s : segments) {
                if (segment_distance(x, y, s) <= half_width) {
                    glyph.pixels[static_cast<std::size_t>(y) * kGlyphSize + x] = 255;
                    break;
                }
            }
        }
    }
    return glyph;
}

// Stroke skeletons for the eight block capitals, drawn with round caps.
std::vector<Segment> letter_strokes(Letter letter) {
    switch (letter) {
        case Letter::H:
            return {{7, 4, 7, 27}, {24, 4, 24, 27}, {7, 16, 24, 16}};
        case Letter::K:
            return {{7, 4, 7, 27}, {23, 4, 8, 16}, {8, 16, 23, 27}};
        case Letter::L:
            return {{7, 4, 7, 27}, {7, 27, 24, 27}};
        case Letter::V:
            return {{6, 4, 16, 27}, {26, 4, 16, 27}};
        case Letter::W:
            return {{5, 4, 10, 27}, {10, 27, 16, 13}, {16, 13, 22, 27}, {22, 27, 27, 4}};
        case Letter::X:
            return {{6, 4, 25, 27}, {25, 4, 6, 27}};
        case Letter::Y:
            return {{6, 4, 16, 15}, {26, 4, 16, 15}, {16, 15, 16, 27}};
        case Letter::Z:
            return {{6, 4, 25, 4}, {25, 4, 6, 27}, {6, 27, 25, 27}};
    }
    throw std::logic_error("unreachable letter");
}

double glyph_mae(const GrayImage& a, const GrayImage& b) {
    double sum = 0.0;
    for (std::size_t p = 0; p < a.pixels.size(); ++p) {
        sum += std::abs(static_cast<int>(a.pixels[p]) - static_cast<int>(b.pixels[p]));
    }
    return sum / static_cast<double>(a.pixels.size());
}

} // namespace

char letter_char(Letter letter) { return kLetterChars[static_cast<int>(letter)]; }

std::optional<Letter> letter_from_char(char c) {
    for (int i = 0; i < kLetterCount; ++i) {
        if (kLetterChars[i] == c) return static_cast<Letter>(i);
    }
    return std::nullopt;
}

GlyphSet GlyphSet::builtin() {
    GlyphSet set;
    for (int i = 0; i < kLetterCount; ++i) {
        set.glyphs_[static_cast<std::size_t>(i)] =
            rasterize(letter_strokes(static_cast<Letter>(i)), 2.0);
    }
    set.compute_mae_matrix();
    set.validate();
    return set;
}

GlyphSet GlyphSet::load(const std::filesystem::path& dir) {
    GlyphSet set;
    for (int i = 0; i < kLetterCount; ++i) {
        const char name[2] = {static_cast<char>(std::tolower(kLetterChars[i])), '\0'};
        const std::filesystem::path file = dir / (std::string(name) + ".png");
        set.glyphs_[static_cast<std::size_t>(i)] =
            load_image(file, ExpectedSize{kGlyphSize, kGlyphSize});
    }
    set.compute_mae_matrix();
    set.validate();
    return set;
}

void GlyphSet::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < kLetterCount; ++i) {
        const char name[2] = {static_cast<char>(std::tolower(kLetterChars[i])), '\0'};
        save_image(glyphs_[static_cast<std::size_t>(i)], dir / (std::string(name) + ".png"));
    }
}

const GrayImage& GlyphSet::glyph(Letter letter) const {
    return glyphs_[static_cast<std::size_t>(letter)];
}

double GlyphSet::pairwise_mae(Letter a, Letter b) const {
    return mae_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

void GlyphSet::compute_mae_matrix() {
    max_mae_ = 0.0;
    for (int a = 0; a < kLetterCount; ++a) {
        for (int b = 0; b < kLetterCount; ++b) {
            mae_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                glyph_mae(glyphs_[static_cast<std::size_t>(a)],
                          glyphs_[static_cast<std::size_t>(b)]);
            max_mae_ = std::max(max_mae_, mae_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
        }
    }
}

void GlyphSet::validate() const {
    for (int i = 0; i < kLetterCount; ++i) {
        const GrayImage& g = glyphs_[static_cast<std::size_t>(i)];
        if (g.width != kGlyphSize || g.height != kGlyphSize) {
            throw std::runtime_error("glyph raster is not 32x32");
        }
        std::size_t fg = 0;
        for (const std::uint8_t v : g.pixels) {
            if (v != 0 && v != 255) throw std::runtime_error("glyph raster is not binary");
            if (v == 255) ++fg;
        }
        if (fg == 0) throw std::runtime_error("glyph has an empty foreground");
    }
    for (int a = 0; a < kLetterCount; ++a) {
        for (int b = a + 1; b < kLetterCount; ++b) {
            if (glyphs_[static_cast<std::size_t>(a)].pixels ==
                glyphs_[static_cast<std::size_t>(b)].pixels) {
                throw std::runtime_error("two glyphs are identical");
            }
        }
    }
}

void AlphabetRules::validate() const {
    int sum = 0;
    for (const int f : frequencies) {
        if (f < 0) throw std::invalid_argument("negative letter frequency");
        sum += f;
    }
    if (sum != kSequenceLength) {
        throw std::invalid_argument("letter frequencies must sum to 64");
    }
    const int h = frequencies[static_cast<std::size_t>(Letter::H)];
    const int v = frequencies[static_cast<std::size_t>(Letter::V)];
    const int w = frequencies[static_cast<std::size_t>(Letter::W)];
    const int y = frequencies[static_cast<std::size_t>(Letter::Y)];
    const int z = frequencies[static_cast<std::size_t>(Letter::Z)];
    if (hv_pairs != v) throw std::invalid_argument("every V needs a leading H");
    if (wy_pairs != w || w != y) throw std::invalid_argument("W and Y counts must match the W-Y pairing");
    if (min_hz_pairs < 0) throw std::invalid_argument("negative H-Z pair minimum");
    if (h - hv_pairs - min_hz_pairs < 0 || z - min_hz_pairs < 0) {
        throw std::invalid_argument("not enough H or Z for the demanded pairings");
    }
}

int LetterSequence::excluded_count() const {
    int n = 0;
    for (const LetterToken& t : tokens) n += t.excluded ? 1 : 0;
    return n;
}

std::array<int, kLetterCount> LetterSequence::letter_counts() const {
    std::array<int, kLetterCount> counts{};
    for (const LetterToken& t : tokens) {
        if (!t.excluded) ++counts[static_cast<std::size_t>(t.letter)];
    }
    return counts;
}

LetterSequence arrange_sequence(const AlphabetRules& rules, RngStream& rng) {
    rules.validate();

    // Blocks guarantee the pair rules; leftovers go in as singles. Chance
    // adjacencies on top of the guaranteed twelve H-Z blocks are expected.
    std::vector<std::vector<Letter>> blocks;
    for (int i = 0; i < rules.hv_pairs; ++i) blocks.push_back({Letter::H, Letter::V});
    for (int i = 0; i < rules.wy_pairs; ++i) blocks.push_back({Letter::W, Letter::Y});
    for (int i = 0; i < rules.min_hz_pairs; ++i) {
        if (rng.uniform_below(2) == 0) {
            blocks.push_back({Letter::H, Letter::Z});
        } else {
            blocks.push_back({Letter::Z, Letter::H});
        }
    }
    std::array<int, kLetterCount> singles = rules.frequencies;
    singles[static_cast<std::size_t>(Letter::H)] -= rules.hv_pairs + rules.min_hz_pairs;
    singles[static_cast<std::size_t>(Letter::V)] -= rules.hv_pairs;
    singles[static_cast<std::size_t>(Letter::W)] -= rules.wy_pairs;
    singles[static_cast<std::size_t>(Letter::Y)] -= rules.wy_pairs;
    singles[static_cast<std::size_t>(Letter::Z)] -= rules.min_hz_pairs;
    for (int l = 0; l < kLetterCount; ++l) {
        for (int i = 0; i < singles[static_cast<std::size_t>(l)]; ++i) {
            blocks.push_back({static_cast<Letter>(l)});
        }
    }

    rng.shuffle(blocks);

    LetterSequence seq;
    seq.tokens.reserve(kSequenceLength);
    for (const std::vector<Letter>& block : blocks) {
        for (const Letter l : block) seq.tokens.push_back({l, 0.0, false});
    }
    return seq;
}

GrayImage render_alphabet(const LetterSequence& sequence, const GlyphSet& glyphs) {
    if (sequence.tokens.size() != kSequenceLength) {
        throw std::invalid_argument("sequence must hold 64 tokens");
    }
    GrayImage image;
    image.width = 256;
    image.height = 256;
    image.pixels.assign(256 * 256, 0);
    for (int k = 0; k < kSequenceLength; ++k) {
        const GrayImage& g = glyphs.glyph(sequence.tokens[static_cast<std::size_t>(k)].letter);
        const int by = k / 8 * kGlyphSize;
        const int bx = k % 8 * kGlyphSize;
        for (int y = 0; y < kGlyphSize; ++y) {
            for (int x = 0; x < kGlyphSize; ++x) {
                image.pixels[static_cast<std::size_t>(by + y) * 256 + bx + x] =
                    g.pixels[static_cast<std::size_t>(y) * kGlyphSize + x];
            }
        }
    }
    return image;
}

LetterSequence classify_letters(const GrayImage& image, const GlyphSet& glyphs) {
    if (image.width != 256 || image.height != 256) {
        throw std::invalid_argument("letter classifier expects 256x256 images");
    }
    LetterSequence seq;
    seq.tokens.resize(kSequenceLength);
    for (int k = 0; k < kSequenceLength; ++k) {
        const int by = k / 8 * kGlyphSize;
        const int bx = k % 8 * kGlyphSize;
        double best = std::numeric_limits<double>::infinity();
        Letter best_letter = Letter::H;
        for (int l = 0; l < kLetterCount; ++l) {
            const GrayImage& g = glyphs.glyph(static_cast<Letter>(l));
            double sum = 0.0;
            for (int y = 0; y < kGlyphSize; ++y) {
                for (int x = 0; x < kGlyphSize; ++x) {
                    sum += std::abs(
                        static_cast<int>(image.pixels[static_cast<std::size_t>(by + y) * 256 + bx + x]) -
                        static_cast<int>(g.pixels[static_cast<std::size_t>(y) * kGlyphSize + x]));
                }
            }
            const double mae = sum / (kGlyphSize * kGlyphSize);
            if (mae < best) { // strict: ties keep the lowest letter index
                best = mae;
                best_letter = static_cast<Letter>(l);
            }
        }
        LetterToken& tok = seq.tokens[static_cast<std::size_t>(k)];
        tok.letter = best_letter;
        tok.uncertainty = std::min(16.0, 16.0 * best / glyphs.max_pairwise_mae());
        tok.excluded = tok.uncertainty >= 12.0;
    }
    return seq;
}

FrequencyTestResult frequency_test(const LetterSequence& sequence, const AlphabetRules& rules) {
    if (sequence.excluded_count() >= 8) {
        throw std::runtime_error("too many excluded letters for a frequency test");
    }
    const std::array<int, kLetterCount> counts = sequence.letter_counts();
    FrequencyTestResult r;
    r.exact_match = true;
    for (int l = 0; l < kLetterCount; ++l) {
        const double expected = rules.frequencies[static_cast<std::size_t>(l)];
        const double observed = counts[static_cast<std::size_t>(l)];
        if (observed != expected) r.exact_match = false;
        if (expected > 0.0) {
            r.chi2 += (observed - expected) * (observed - expected) / expected;
        } else if (observed > 0.0) {
            r.chi2 = std::numeric_limits<double>::infinity();
        }
    }
    return r;
}

PairPrevalence pair_prevalence(const LetterSequence& sequence) {
    PairPrevalence p;
    const auto& t = sequence.tokens;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (t[i].excluded || t[i + 1].excluded) continue;
        const Letter a = t[i].letter;
        const Letter b = t[i + 1].letter;
        if (a == Letter::H && b == Letter::V) ++p.hv;
        if (a == Letter::W && b == Letter::Y) ++p.wy;
        if ((a == Letter::H && b == Letter::Z) || (a == Letter::Z && b == Letter::H)) {
            ++p.hz_unordered;
        }
    }
    // A pair member whose predecessor is excluded cannot be judged either way.
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].excluded) continue;
        if (t[i].letter == Letter::V) {
            if (i == 0) {
                ++p.lone_v;
            } else if (!t[i - 1].excluded && t[i - 1].letter != Letter::H) {
                ++p.lone_v;
            }
        }
        if (t[i].letter == Letter::Y) {
            if (i == 0) {
                ++p.lone_y;
            } else if (!t[i - 1].excluded && t[i - 1].letter != Letter::W) {
                ++p.lone_y;
            }
        }
    }
    return p;
}

PositionalReference positional_reference(const std::vector<LetterSequence>& ensemble) {
    if (ensemble.size() < 10000) {
        throw std::invalid_argument("positional reference needs at least 10^4 sequences");
    }
    std::array<std::array<std::int64_t, kLetterCount>, kSequenceLength> counts{};
    for (const LetterSequence& seq : ensemble) {
        for (int k = 0; k < kSequenceLength; ++k) {
            const LetterToken& tok = seq.tokens[static_cast<std::size_t>(k)];
            if (!tok.excluded) {
                ++counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(tok.letter)];
            }
        }
    }
    PositionalReference ref;
    ref.sequences = static_cast<std::int64_t>(ensemble.size());
    for (int k = 0; k < kSequenceLength; ++k) {
        std::int64_t total = 0;
        for (const std::int64_t c : counts[static_cast<std::size_t>(k)]) total += c;
        if (total == 0) throw std::invalid_argument("a grid position has no usable reference letters");
        for (int l = 0; l < kLetterCount; ++l) {
            ref.probs[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
                static_cast<double>(counts[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) /
                static_cast<double>(total);
        }
    }
    return ref;
}

std::array<double, kSequenceLength> positional_error_map(
    const std::vector<LetterSequence>& ensemble, const PositionalReference& reference) {
    if (ensemble.empty()) throw std::invalid_argument("positional error map of an empty ensemble");
    std::array<double, kSequenceLength> map{};
    for (int k = 0; k < kSequenceLength; ++k) {
        std::array<std::int64_t, kLetterCount> counts{};
        std::int64_t total = 0;
        for (const LetterSequence& seq : ensemble) {
            const LetterToken& tok = seq.tokens[static_cast<std::size_t>(k)];
            if (!tok.excluded) {
                ++counts[static_cast<std::size_t>(tok.letter)];
                ++total;
            }
        }
        // Two-sample form with pooled expectations: the reference is itself
        // an estimate, and ignoring its sampling noise inflates the statistic
        // by roughly (1 + n_obs/n_ref) — a true-vs-true split half would sit
        // at twice the 7-df scale. With pooled expectations the statistic
        // stays chi-square(7) for any reference/probe size ratio and
        // converges to the plain goodness-of-fit form as the reference grows.
        double chi2 = 0.0;
        const double n_ref = static_cast<double>(reference.sequences);
        const double n_obs = static_cast<double>(total);
        for (int l = 0; l < kLetterCount; ++l) {
            const double p_ref =
                reference.probs[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
            const double observed = static_cast<double>(counts[static_cast<std::size_t>(l)]);
            if (p_ref > 0.0) {
                if (n_obs == 0.0) continue;
                const double ref_count = p_ref * n_ref;
                const double pooled = (ref_count + observed) / (n_ref + n_obs);
                const double expected_ref = pooled * n_ref;
                const double expected_obs = pooled * n_obs;
                chi2 += (ref_count - expected_ref) * (ref_count - expected_ref) / expected_ref;
                chi2 += (observed - expected_obs) * (observed - expected_obs) / expected_obs;
            } else if (observed > 0.0) {
                // A letter the reference never saw at this position is a
                // structural violation, not sampling noise.
                chi2 = std::numeric_limits<double>::infinity();
            }
        }
        map[static_cast<std::size_t>(k)] = chi2;
    }
    return map;
}

HzDistribution hz_distribution(const std::vector<LetterSequence>& ensemble, int min_required) {
    if (ensemble.empty()) throw std::invalid_argument("H-Z distribution of an empty ensemble");
    HzDistribution d;
    d.min_count = std::numeric_limits<int>::max();
    double sum = 0.0;
    double sum2 = 0.0;
    for (const LetterSequence& seq : ensemble) {
        const int hz = pair_prevalence(seq).hz_unordered;
        sum += hz;
        sum2 += static_cast<double>(hz) * hz;
        d.min_count = std::min(d.min_count, hz);
        if (hz < min_required) ++d.violations;
    }
    const double n = static_cast<double>(ensemble.size());
    d.mean = sum / n;
    const double var = std::max(0.0, sum2 / n - d.mean * d.mean);
    d.stddev = std::sqrt(var);
    return d;
}

LetterSequence letter_swap_mutation(const LetterSequence& sequence, RngStream& rng) {
    LetterSequence out = sequence;
    const std::size_t pos = static_cast<std::size_t>(rng.uniform_below(out.tokens.size()));
    const int old = static_cast<int>(out.tokens[pos].letter);
    // Uniform over the other seven letters.
    int pick = static_cast<int>(rng.uniform_below(kLetterCount - 1));
    if (pick >= old) ++pick;
    out.tokens[pos] = {static_cast<Letter>(pick), 0.0, false};
    return out;
}

} // namespace somgen
