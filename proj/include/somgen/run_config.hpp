#pragma once

// Run configuration shared by the CLI subcommands: which SOM, how many
// realizations, seeding, class mix, calibration sizing, and the per-module
// knobs. Loadable from a JSON file; command-line flags override fields.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "somgen/alphabet.hpp"
#include "somgen/clb.hpp"
#include "somgen/flags.hpp"
#include "somgen/manifest.hpp"
#include "somgen/region_detect.hpp"
#include "somgen/zero_crossings.hpp"

namespace somgen {

struct RunConfig {
    SomKind som = SomKind::flags;
    int ensemble_size = 0;
    std::uint64_t master_seed = 0;

    // Per-class prevalence weights for the class-structured SOMs (flags,
    // voronoi); empty means uniform. Exclusion experiments set some weights
    // to zero. Must be non-negative and not all zero.
    std::vector<double> class_weights;

    // Intensity-test tolerances sit at this percentile of the calibration
    // ensemble's statistic distribution.
    double tolerance_percentile = 0.995;
    int calibration_size = 2000;
    std::uint64_t calibration_seed = 0x5eedca11b;

    FlagsModel flags_model;
    RandomnessConfig randomness;
    RegionDetectConfig detection;
    AlphabetRules alphabet_rules;
    ClbParams clb_params;
    ZeroCrossingConfig zero_crossing;
    double artifact_density_bound = 0.01; // interior zero-crossing pass bound

    std::string output_dir;
    int jobs = 0; // 0 = SOMGEN_JOBS env, then hardware concurrency

    void validate() const;

    /// Effective per-class weights for an n-class SOM (uniform when unset).
    std::vector<double> effective_weights(int n_classes) const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Hash of every field that influences calibration artifacts; cached
    /// calibrations are keyed by it so a stale file is never silently reused.
    std::string calibration_hash() const;
};

} // namespace somgen
