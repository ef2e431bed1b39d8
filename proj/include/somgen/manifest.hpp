#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace somgen {

enum class SomKind { clb, flags, voronoi, alphabet, external };

std::string to_string(SomKind kind);
SomKind som_kind_from_string(const std::string& name);

struct ManifestEntry {
    std::string path; // relative to the manifest file
    std::optional<int> class_label;
    std::uint64_t seed = 0;
};

/// Seed-reproducible listing of an ensemble. Schema-versioned JSON, one file
/// per ensemble; entry paths are relative to the manifest's directory.
struct EnsembleManifest {
    static constexpr int kSchemaVersion = 1;

    SomKind som_name = SomKind::external;
    std::uint64_t master_seed = 0;
    nlohmann::json generation_params = nlohmann::json::object();
    std::vector<ManifestEntry> entries;

    nlohmann::json to_json() const;
    static EnsembleManifest from_json(const nlohmann::json& j);

    void save(const std::filesystem::path& path) const;
    static EnsembleManifest load(const std::filesystem::path& path);

    /// Absolute entry paths given the manifest location.
    static std::filesystem::path resolve_entry(const std::filesystem::path& manifest_path,
                                               const ManifestEntry& entry);
};

} // namespace somgen
