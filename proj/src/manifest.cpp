#include "somgen/manifest.hpp"

#include <fstream>
#include <stdexcept>

namespace somgen {

std::string to_string(SomKind kind) {
    switch (kind) {
        case SomKind::clb: return "clb";
        case SomKind::flags: return "flags";
        case SomKind::voronoi: return "voronoi";
        case SomKind::alphabet: return "alphabet";
        case SomKind::external: return "external";
    }
    throw std::logic_error("unreachable SomKind");
}

SomKind som_kind_from_string(const std::string& name) {
    if (name == "clb") return SomKind::clb;
    if (name == "flags") return SomKind::flags;
    if (name == "voronoi") return SomKind::voronoi;
    if (name == "alphabet") return SomKind::alphabet;
    if (name == "external") return SomKind::external;
    throw std::invalid_argument("unknown som_name '" + name + "'");
}

nlohmann::json EnsembleManifest::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["som_name"] = to_string(som_name);
    j["master_seed"] = master_seed;
    j["params"] = generation_params;
    auto& list = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["path"] = e.path;
        if (e.class_label) je["class"] = *e.class_label;
        else je["class"] = nullptr;
        je["seed"] = e.seed;
        list.push_back(std::move(je));
    }
    return j;
}

EnsembleManifest EnsembleManifest::from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw std::runtime_error("manifest: unsupported schema_version");
    EnsembleManifest m;
    m.som_name = som_kind_from_string(j.at("som_name").get<std::string>());
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.generation_params = j.value("params", nlohmann::json::object());
    for (const auto& je : j.at("entries")) {
        ManifestEntry e;
        e.path = je.at("path").get<std::string>();
        if (je.contains("class") && !je.at("class").is_null()) e.class_label = je.at("class").get<int>();
        e.seed = je.at("seed").get<std::uint64_t>();
        m.entries.push_back(std::move(e));
    }
    return m;
}

void EnsembleManifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
    out << to_json().dump(2) << '\n';
}

EnsembleManifest EnsembleManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read manifest " + path.string());
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

std::filesystem::path EnsembleManifest::resolve_entry(const std::filesystem::path& manifest_path,
                                                      const ManifestEntry& entry) {
    return manifest_path.parent_path() / entry.path;
}

} // namespace somgen
