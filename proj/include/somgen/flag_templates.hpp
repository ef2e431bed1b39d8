#pragma once

// The eight-class block-grid template set: 16x16 boolean foreground layouts,
// one per class, shipped as a JSON asset and validated on load.

#include <array>
#include <bitset>
#include <filesystem>
#include <string>
#include <vector>

namespace somgen {

/// One class layout. Cell (row, col) is foreground iff the bit row*16+col is set.
struct FlagTemplate {
    int class_id = 0;             // 1..8
    std::bitset<256> foreground;

    bool fg(int row, int col) const {
        return foreground.test(static_cast<std::size_t>(row * 16 + col));
    }
};

class FlagTemplateSet {
  public:
    static constexpr int kGridSize = 16;
    static constexpr int kForegroundCells = 80;
    static constexpr int kMinNeverForeground = 24;
    // Top-left canton block (rows 0-3, cols 0-5) is background in every class.
    static constexpr int kCantonRows = 4;
    static constexpr int kCantonCols = 6;

    /// The built-in template set (also the content of the JSON asset).
    static FlagTemplateSet canonical();

    static FlagTemplateSet load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Enforces: 8 classes; exactly 80 foreground cells each; canton cells
    /// background everywhere; pairwise distinct layouts; >= 24 cells never
    /// foreground in any class. Throws std::runtime_error on violation.
    void validate() const;

    const FlagTemplate& for_class(int class_id) const;
    const std::vector<FlagTemplate>& all() const { return templates_; }

    /// Cells that are background in all eight classes.
    std::bitset<256> never_foreground() const;

  private:
    std::vector<FlagTemplate> templates_;
};

} // namespace somgen
