#include "somgen/flag_templates.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace somgen {

namespace {

// Each class drawn as 16 rows of '.'/'#'. Designed so every layout has exactly
// 80 foreground cells, the canton (rows 0-3, cols 0-5) is always background,
// and 34 cells are background in every class.
constexpr const char* kCanonicalRows[8][16] = {
    // class 1: horizontal stripes
    {"................",
     "................",
     "................",
     "................",
     "................",
     "################",
     "................",
     "################",
     "................",
     "################",
     "................",
     "################",
     "................",
     "################",
     "................",
     "................"},
    // class 2: vertical stripes
    {"......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#.",
     "......#.#.#.#.#."},
    // class 3: checkerboard on the lower ten rows
    {"................",
     "................",
     "................",
     "................",
     "................",
     "................",
     "#.#.#.#.#.#.#.#.",
     ".#.#.#.#.#.#.#.#",
     "#.#.#.#.#.#.#.#.",
     ".#.#.#.#.#.#.#.#",
     "#.#.#.#.#.#.#.#.",
     ".#.#.#.#.#.#.#.#",
     "#.#.#.#.#.#.#.#.",
     ".#.#.#.#.#.#.#.#",
     "#.#.#.#.#.#.#.#.",
     ".#.#.#.#.#.#.#.#"},
    // class 4: bottom-right block
    {"................",
     "................",
     "................",
     "................",
     "................",
     "................",
     "................",
     "................",
     "......##########",
     "......##########",
     "......##########",
     "......##########",
     "......##########",
     "......##########",
     "......##########",
     "......##########"},
    // class 5: double border
    {"................",
     "................",
     "................",
     "................",
     "################",
     "#..............#",
     "#..............#",
     "#..##########..#",
     "#..#........#..#",
     "#..#........#..#",
     "#..#........#..#",
     "#..#........#..#",
     "#..##########..#",
     "#..............#",
     "#..............#",
     "################"},
    // class 6: diagonal band
    {"................",
     "................",
     "................",
     "......#.........",
     ".#######........",
     "..#######.......",
     "...#######......",
     "....#######.....",
     ".....#######....",
     "......#######...",
     ".......#######..",
     "........#######.",
     ".........#######",
     "..........######",
     "...........#####",
     "...........#####"},
    // class 7: three corner blocks plus a center plus-sign
    {"...........#####",
     "...........#####",
     "...........#####",
     "...........#####",
     "...........#####",
     "................",
     "................",
     "........#.......",
     ".......###......",
     "........#.......",
     "................",
     "#####......#####",
     "#####......#####",
     "#####......#####",
     "#####......#####",
     "#####......#####"},
    // class 8: left block
    {"................",
     "................",
     "................",
     "................",
     "................",
     "................",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........",
     "########........"},
};

FlagTemplate parse_rows(int class_id, const std::vector<std::string>& rows) {
    if (rows.size() != FlagTemplateSet::kGridSize) {
        throw std::runtime_error("flag template needs 16 rows");
    }
    FlagTemplate t;
    t.class_id = class_id;
    for (int r = 0; r < FlagTemplateSet::kGridSize; ++r) {
        const std::string& row = rows[static_cast<std::size_t>(r)];
        if (row.size() != FlagTemplateSet::kGridSize) {
            throw std::runtime_error("flag template row needs 16 cells");
        }
        for (int c = 0; c < FlagTemplateSet::kGridSize; ++c) {
            if (row[static_cast<std::size_t>(c)] == '#') {
                t.foreground.set(static_cast<std::size_t>(r * 16 + c));
            } else if (row[static_cast<std::size_t>(c)] != '.') {
                throw std::runtime_error("flag template cells must be '.' or '#'");
            }
        }
    }
    return t;
}

} // namespace

FlagTemplateSet FlagTemplateSet::canonical() {
    FlagTemplateSet set;
    for (int k = 0; k < 8; ++k) {
        std::vector<std::string> rows;
        rows.reserve(16);
        for (int r = 0; r < 16; ++r) rows.emplace_back(kCanonicalRows[k][r]);
        set.templates_.push_back(parse_rows(k + 1, rows));
    }
    set.validate();
    return set;
}

FlagTemplateSet FlagTemplateSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open template file: " + path.string());
    nlohmann::json j;
    in >> j;
    FlagTemplateSet set;
    for (const auto& entry : j.at("templates")) {
        set.templates_.push_back(parse_rows(entry.at("class_id").get<int>(),
                                            entry.at("rows").get<std::vector<std::string>>()));
    }
    set.validate();
    return set;
}

void FlagTemplateSet::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["templates"] = nlohmann::json::array();
    for (const FlagTemplate& t : templates_) {
        std::vector<std::string> rows;
        for (int r = 0; r < 16; ++r) {
            std::string row(16, '.');
            for (int c = 0; c < 16; ++c)
                if (t.fg(r, c)) row[static_cast<std::size_t>(c)] = '#';
            rows.push_back(std::move(row));
        }
        j["templates"].push_back({{"class_id", t.class_id}, {"rows", rows}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write template file: " + path.string());
    out << j.dump(2) << '\n';
}

void FlagTemplateSet::validate() const {
    if (templates_.size() != 8) throw std::runtime_error("template set needs 8 classes");
    for (std::size_t i = 0; i < templates_.size(); ++i) {
        const FlagTemplate& t = templates_[i];
        if (t.class_id != static_cast<int>(i) + 1) {
            throw std::runtime_error("template classes must be 1..8 in order");
        }
        if (static_cast<int>(t.foreground.count()) != kForegroundCells) {
            throw std::runtime_error("each template needs exactly 80 foreground cells");
        }
        for (int r = 0; r < kCantonRows; ++r) {
            for (int c = 0; c < kCantonCols; ++c) {
                if (t.fg(r, c)) {
                    throw std::runtime_error("canton cells must stay background");
                }
            }
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (templates_[k].foreground == t.foreground) {
                throw std::runtime_error("templates must be pairwise distinct");
            }
        }
    }
    const std::size_t never = never_foreground().count();
    if (never < static_cast<std::size_t>(kMinNeverForeground)) {
        throw std::runtime_error("fewer than 24 never-foreground cells");
    }
}

const FlagTemplate& FlagTemplateSet::for_class(int class_id) const {
    if (class_id < 1 || class_id > static_cast<int>(templates_.size())) {
        throw std::out_of_range("flag class out of range");
    }
    return templates_[static_cast<std::size_t>(class_id - 1)];
}

std::bitset<256> FlagTemplateSet::never_foreground() const {
    std::bitset<256> any;
    for (const FlagTemplate& t : templates_) any |= t.foreground;
    return ~any;
}

} // namespace somgen
