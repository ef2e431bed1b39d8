#pragma once

// Letter-raster SOM: 64-token sequences over {H,K,L,V,W,X,Y,Z} with exact
// frequencies and adjacency rules, rendered as an 8x8 grid of 32x32 glyphs,
// plus the template-matching classifier and rule validators.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "somgen/gray_image.hpp"
#include "somgen/rng.hpp"

namespace somgen {

enum class Letter : std::uint8_t { H = 0, K, L, V, W, X, Y, Z };
inline constexpr int kLetterCount = 8;
inline constexpr int kSequenceLength = 64;
inline constexpr int kGlyphSize = 32;

char letter_char(Letter letter);
std::optional<Letter> letter_from_char(char c);

/// The eight 32x32 glyph bitmaps (255 foreground on 0 background) and the
/// pairwise mean-absolute-error matrix that anchors the uncertainty scale.
class GlyphSet {
  public:
    /// Stroke-rasterized block capitals (also the content of the PNG assets).
    static GlyphSet builtin();

    /// Reads <dir>/h.png ... <dir>/z.png.
    static GlyphSet load(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;

    const GrayImage& glyph(Letter letter) const;
    double pairwise_mae(Letter a, Letter b) const;
    double max_pairwise_mae() const { return max_mae_; }

    /// Enforces: 32x32 strictly binary rasters, nonempty foreground,
    /// pairwise distinct. Throws std::runtime_error on violation.
    void validate() const;

  private:
    void compute_mae_matrix();

    std::array<GrayImage, kLetterCount> glyphs_;
    std::array<std::array<double, kLetterCount>, kLetterCount> mae_{};
    double max_mae_ = 0.0;
};

struct AlphabetRules {
    // Letter frequencies in H,K,L,V,W,X,Y,Z order; they must sum to 64.
    std::array<int, kLetterCount> frequencies = {16, 2, 1, 4, 8, 1, 8, 24};
    int hv_pairs = 4;      // every V sits directly after an H
    int wy_pairs = 8;      // every Y sits directly after a W
    int min_hz_pairs = 12; // adjacent H-Z (either order) at least this often

    void validate() const;
};

struct LetterToken {
    Letter letter = Letter::H;
    double uncertainty = 0.0; // 0-16 scale; 0 = exact template match
    bool excluded = false;    // uncertainty >= 12
};

struct LetterSequence {
    std::vector<LetterToken> tokens; // 64 in raster (row-wrapping) order

    int excluded_count() const;
    std::array<int, kLetterCount> letter_counts() const; // excluded tokens skipped
};

/// Block construction: hv (H,V) blocks, wy (W,Y) blocks, min_hz H-Z blocks
/// with fair-coin order, remaining letters as singles; uniform shuffle of the
/// blocks; flatten. Satisfies all three rule families by construction.
LetterSequence arrange_sequence(const AlphabetRules& rules, RngStream& rng);

/// Token k is drawn as an exact glyph copy at grid block (k div 8, k mod 8).
GrayImage render_alphabet(const LetterSequence& sequence, const GlyphSet& glyphs);

/// Per-block argmin-MAE template match. Uncertainty maps the best MAE onto
/// the 16-unit scale [0, max pairwise template MAE], clamped at 16; 12 or
/// higher marks the token excluded.
LetterSequence classify_letters(const GrayImage& image, const GlyphSet& glyphs);

struct FrequencyTestResult {
    double chi2 = 0.0;
    bool exact_match = false;
};

/// Chi-square of non-excluded letter counts against the prescription.
/// Throws std::runtime_error when 8 or more tokens are excluded.
FrequencyTestResult frequency_test(const LetterSequence& sequence, const AlphabetRules& rules);

struct PairPrevalence {
    int hv = 0;           // H immediately before V
    int wy = 0;           // W immediately before Y
    int hz_unordered = 0; // adjacent H-Z in either order
    int lone_v = 0;       // V without an H directly before it
    int lone_y = 0;       // Y without a W directly before it
};

/// Counts over the 63 flattened adjacent pairs (row wrap included, no
/// end-to-start wrap). Excluded tokens break the pairs they touch.
PairPrevalence pair_prevalence(const LetterSequence& sequence);

struct PositionalReference {
    // Per grid position, reference letter distribution (rows sum to 1).
    std::array<std::array<double, kLetterCount>, kSequenceLength> probs{};
    std::int64_t sequences = 0;
};

/// Estimates the per-position letter distribution from a true ensemble.
/// Throws std::invalid_argument below 10^4 sequences (insufficient reference).
PositionalReference positional_reference(const std::vector<LetterSequence>& ensemble);

/// Per grid position, two-sample chi-square (pooled expectations) of the
/// observed letter counts against the reference ensemble's. The pooled form
/// accounts for the reference's own sampling noise, so a true-vs-true split
/// stays on the 7-df null scale at any reference/probe size ratio. Letters
/// the reference never saw at a position contribute 0 when absent and
/// +infinity when observed. Throws on an empty ensemble.
std::array<double, kSequenceLength> positional_error_map(
    const std::vector<LetterSequence>& ensemble, const PositionalReference& reference);

struct HzDistribution {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation
    int min_count = 0;
    int violations = 0; // realizations below the hard minimum of 12
};

HzDistribution hz_distribution(const std::vector<LetterSequence>& ensemble,
                               int min_required = 12);

/// Mutation probe: replaces one uniformly chosen token with a different
/// uniformly chosen letter, which always breaks the exact frequencies.
LetterSequence letter_swap_mutation(const LetterSequence& sequence, RngStream& rng);

} // namespace somgen
