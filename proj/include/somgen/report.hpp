#pragma once

// Generation and report engine behind the CLI: ensemble generation with
// manifests, calibration artifacts, per-realization evaluation reports, and
// two-ensemble comparison. Everything here is deterministic given its inputs;
// reports carry no timestamps so identical inputs serialize byte-identically.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "somgen/manifest.hpp"
#include "somgen/run_config.hpp"

namespace somgen {

/// Thresholds and references frozen from a true calibration ensemble, keyed
/// by the hash of every config field that influences them.
struct CalibrationArtifacts {
    static constexpr int kSchemaVersion = 1;

    SomKind som = SomKind::flags;
    std::string config_hash;
    double tolerance_percentile = 0.995;

    // flags: chi-square pass thresholds for the two pixel populations
    double fg_threshold = 0.0;
    double bg_threshold = 0.0;

    // voronoi: class-conditional mean recovered counts and the bin edges
    std::vector<double> mean_counts;
    std::vector<double> count_bins;

    // alphabet: reference per-position letter distribution
    std::array<std::array<double, 8>, 64> positional_probs{};
    std::int64_t positional_sequences = 0;

    nlohmann::json to_json() const;
    static CalibrationArtifacts from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static CalibrationArtifacts load(const std::filesystem::path& path);
};

/// Builds the SOM-appropriate artifacts from a freshly generated true
/// ensemble of config.calibration_size realizations (CLB needs none).
CalibrationArtifacts calibrate_artifacts(const RunConfig& config);

/// One realization in memory, ready for evaluation. `error` nonempty marks
/// an exclusion (unreadable file, wrong dimensions).
struct EnsembleItem {
    int id = 0;
    std::string path;
    std::optional<int> class_label;
    std::optional<std::uint64_t> seed;
    GrayImage image;
    std::string error;
};

/// Deterministic ensemble in memory: class labels from the configured
/// prevalence weights, one independent substream per realization.
std::vector<EnsembleItem> generate_in_memory(const RunConfig& config);

/// generate_in_memory + PNG files + manifest.json under config.output_dir.
EnsembleManifest generate_ensemble(const RunConfig& config);

/// Re-renders one manifest entry from its recorded seed; bit-identical to
/// the originally written image.
GrayImage regenerate_entry(const EnsembleManifest& manifest, const ManifestEntry& entry);

/// Loads a manifest (with labels and seeds) or a bare directory of PNGs
/// (ids in lexicographic filename order, no labels or seeds).
std::vector<EnsembleItem> load_ensemble(const std::filesystem::path& manifest_or_dir);

struct RealizationRow {
    int id = 0;
    std::string path;
    std::optional<int> true_class;
    std::optional<int> recovered_class;
    nlohmann::json stats = nlohmann::json::object();
    nlohmann::json passes = nlohmann::json::object();
    std::string exclusion; // nonempty = not evaluated

    nlohmann::json to_json() const;
};

struct EvaluationReport {
    static constexpr int kSchemaVersion = 1;

    SomKind som = SomKind::flags;
    std::string config_hash;
    nlohmann::json calibration = nlohmann::json::object();
    std::vector<RealizationRow> rows; // ordered by id
    nlohmann::json summary = nlohmann::json::object();

    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
};

/// Runs the SOM-appropriate recovery pipeline and validators over every item.
/// Validation failures are recorded in the report, never thrown.
EvaluationReport evaluate_ensemble(const std::vector<EnsembleItem>& items,
                                   const RunConfig& config,
                                   const CalibrationArtifacts& calibration);

struct ComparisonReport {
    static constexpr int kSchemaVersion = 1;

    int n_a = 0;
    int n_b = 0;
    double max_qq_gap = 0.0;
    std::vector<std::array<double, 3>> qq;        // probability, quantile_a, quantile_b
    std::vector<std::array<double, 5>> histogram; // level, count_a, count_b, density_a, density_b
    std::optional<double> frechet;

    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
};

/// Pooled-intensity QQ and histogram curves; Fréchet distance when per-image
/// feature rows are supplied for both sides.
ComparisonReport compare_ensembles(const std::vector<EnsembleItem>& a,
                                   const std::vector<EnsembleItem>& b,
                                   const std::vector<std::vector<double>>& features_a = {},
                                   const std::vector<std::vector<double>>& features_b = {},
                                   int qq_probes = 512);

} // namespace somgen
