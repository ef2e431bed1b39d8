#include "somgen/run_config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace somgen {

namespace {

nlohmann::json beta_to_json(const BetaSpec& spec) {
    return {{"alpha", spec.alpha}, {"beta", spec.beta}, {"lambda", spec.lambda}, {"sigma", spec.sigma}};
}

BetaSpec beta_from_json(const nlohmann::json& j) {
    BetaSpec spec;
    spec.alpha = j.at("alpha").get<double>();
    spec.beta = j.at("beta").get<double>();
    spec.lambda = j.at("lambda").get<double>();
    spec.sigma = j.at("sigma").get<double>();
    return spec;
}

const char* threshold_mode_name(RegionDetectConfig::ThresholdMode mode) {
    return mode == RegionDetectConfig::ThresholdMode::absolute ? "absolute" : "percentile";
}

RegionDetectConfig::ThresholdMode threshold_mode_from(const std::string& name) {
    if (name == "absolute") return RegionDetectConfig::ThresholdMode::absolute;
    if (name == "percentile") return RegionDetectConfig::ThresholdMode::percentile;
    throw std::invalid_argument("RunConfig: unknown threshold_mode '" + name + "'");
}

} // namespace

void RunConfig::validate() const {
    if (ensemble_size <= 0) throw std::invalid_argument("RunConfig: ensemble_size must be positive");
    if (!class_weights.empty()) {
        double total = 0.0;
        for (double w : class_weights) {
            if (w < 0.0) throw std::invalid_argument("RunConfig: class weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("RunConfig: class weights must not all be zero");
    }
    if (!(tolerance_percentile > 0.0 && tolerance_percentile < 1.0))
        throw std::invalid_argument("RunConfig: tolerance_percentile must lie in (0, 1)");
    if (calibration_size <= 0)
        throw std::invalid_argument("RunConfig: calibration_size must be positive");
    alphabet_rules.validate();
    clb_params.validate();
}

std::vector<double> RunConfig::effective_weights(int n_classes) const {
    if (class_weights.empty())
        return std::vector<double>(static_cast<std::size_t>(n_classes), 1.0);
    if (static_cast<int>(class_weights.size()) != n_classes)
        throw std::invalid_argument("RunConfig: class weight count does not match the class count");
    return class_weights;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["som"] = to_string(som);
    j["ensemble_size"] = ensemble_size;
    j["master_seed"] = master_seed;
    j["class_weights"] = class_weights;
    j["tolerance_percentile"] = tolerance_percentile;
    j["calibration_size"] = calibration_size;
    j["calibration_seed"] = calibration_seed;
    j["flags_model"] = {{"foreground", beta_to_json(flags_model.foreground)},
                        {"background", beta_to_json(flags_model.background)},
                        {"tile_mean_threshold", flags_model.tile_mean_threshold},
                        {"tile_size", flags_model.tile_size}};
    j["randomness"] = {{"per_tile_alpha", randomness.per_tile_alpha},
                       {"max_violations", randomness.max_violations}};
    j["detection"] = {{"hessian_sigma", detection.hessian_sigma},
                      {"threshold_mode", threshold_mode_name(detection.threshold_mode)},
                      {"hessian_threshold", detection.hessian_threshold},
                      {"threshold_percentile", detection.threshold_percentile},
                      {"erosion_iterations", detection.erosion_iterations},
                      {"min_region_area", detection.min_region_area}};
    j["alphabet_rules"] = {{"frequencies", alphabet_rules.frequencies},
                           {"hv_pairs", alphabet_rules.hv_pairs},
                           {"wy_pairs", alphabet_rules.wy_pairs},
                           {"min_hz_pairs", alphabet_rules.min_hz_pairs}};
    j["clb_params"] = {{"mean_clusters", clb_params.mean_clusters},
                       {"mean_lumps_per_cluster", clb_params.mean_lumps_per_cluster},
                       {"cluster_spread", clb_params.cluster_spread},
                       {"lump_length", clb_params.lump_length},
                       {"lump_width", clb_params.lump_width},
                       {"alpha_exp", clb_params.alpha_exp},
                       {"beta_exp", clb_params.beta_exp},
                       {"amplitude", clb_params.amplitude},
                       {"bbox_factor", clb_params.bbox_factor},
                       {"normalization",
                        {{"scale", clb_params.normalization.scale},
                         {"offset", clb_params.normalization.offset}}}};
    j["zero_crossing"] = {{"smooth_sigma", zero_crossing.smooth_sigma},
                          {"epsilon", zero_crossing.epsilon},
                          {"gradient_threshold", zero_crossing.gradient_threshold},
                          {"boundary_band", zero_crossing.boundary_band}};
    j["artifact_density_bound"] = artifact_density_bound;
    j["output_dir"] = output_dir;
    j["jobs"] = jobs;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("som")) c.som = som_kind_from_string(j.at("som").get<std::string>());
    c.ensemble_size = j.value("ensemble_size", c.ensemble_size);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("class_weights")) c.class_weights = j.at("class_weights").get<std::vector<double>>();
    c.tolerance_percentile = j.value("tolerance_percentile", c.tolerance_percentile);
    c.calibration_size = j.value("calibration_size", c.calibration_size);
    c.calibration_seed = j.value("calibration_seed", c.calibration_seed);
    if (j.contains("flags_model")) {
        const auto& f = j.at("flags_model");
        if (f.contains("foreground")) c.flags_model.foreground = beta_from_json(f.at("foreground"));
        if (f.contains("background")) c.flags_model.background = beta_from_json(f.at("background"));
        c.flags_model.tile_mean_threshold =
            f.value("tile_mean_threshold", c.flags_model.tile_mean_threshold);
        c.flags_model.tile_size = f.value("tile_size", c.flags_model.tile_size);
    }
    if (j.contains("randomness")) {
        const auto& r = j.at("randomness");
        c.randomness.per_tile_alpha = r.value("per_tile_alpha", c.randomness.per_tile_alpha);
        c.randomness.max_violations = r.value("max_violations", c.randomness.max_violations);
    }
    if (j.contains("detection")) {
        const auto& d = j.at("detection");
        c.detection.hessian_sigma = d.value("hessian_sigma", c.detection.hessian_sigma);
        if (d.contains("threshold_mode"))
            c.detection.threshold_mode = threshold_mode_from(d.at("threshold_mode").get<std::string>());
        c.detection.hessian_threshold = d.value("hessian_threshold", c.detection.hessian_threshold);
        c.detection.threshold_percentile =
            d.value("threshold_percentile", c.detection.threshold_percentile);
        c.detection.erosion_iterations = d.value("erosion_iterations", c.detection.erosion_iterations);
        c.detection.min_region_area = d.value("min_region_area", c.detection.min_region_area);
    }
    if (j.contains("alphabet_rules")) {
        const auto& a = j.at("alphabet_rules");
        if (a.contains("frequencies")) {
            const auto freq = a.at("frequencies").get<std::vector<int>>();
            if (freq.size() != static_cast<std::size_t>(kLetterCount))
                throw std::invalid_argument("RunConfig: alphabet frequencies need 8 entries");
            std::copy(freq.begin(), freq.end(), c.alphabet_rules.frequencies.begin());
        }
        c.alphabet_rules.hv_pairs = a.value("hv_pairs", c.alphabet_rules.hv_pairs);
        c.alphabet_rules.wy_pairs = a.value("wy_pairs", c.alphabet_rules.wy_pairs);
        c.alphabet_rules.min_hz_pairs = a.value("min_hz_pairs", c.alphabet_rules.min_hz_pairs);
    }
    if (j.contains("clb_params")) {
        const auto& p = j.at("clb_params");
        c.clb_params.mean_clusters = p.value("mean_clusters", c.clb_params.mean_clusters);
        c.clb_params.mean_lumps_per_cluster =
            p.value("mean_lumps_per_cluster", c.clb_params.mean_lumps_per_cluster);
        c.clb_params.cluster_spread = p.value("cluster_spread", c.clb_params.cluster_spread);
        c.clb_params.lump_length = p.value("lump_length", c.clb_params.lump_length);
        c.clb_params.lump_width = p.value("lump_width", c.clb_params.lump_width);
        c.clb_params.alpha_exp = p.value("alpha_exp", c.clb_params.alpha_exp);
        c.clb_params.beta_exp = p.value("beta_exp", c.clb_params.beta_exp);
        c.clb_params.amplitude = p.value("amplitude", c.clb_params.amplitude);
        c.clb_params.bbox_factor = p.value("bbox_factor", c.clb_params.bbox_factor);
        if (p.contains("normalization")) {
            const auto& n = p.at("normalization");
            c.clb_params.normalization.scale = n.value("scale", c.clb_params.normalization.scale);
            c.clb_params.normalization.offset = n.value("offset", c.clb_params.normalization.offset);
        }
    }
    if (j.contains("zero_crossing")) {
        const auto& z = j.at("zero_crossing");
        c.zero_crossing.smooth_sigma = z.value("smooth_sigma", c.zero_crossing.smooth_sigma);
        c.zero_crossing.epsilon = z.value("epsilon", c.zero_crossing.epsilon);
        c.zero_crossing.gradient_threshold =
            z.value("gradient_threshold", c.zero_crossing.gradient_threshold);
        c.zero_crossing.boundary_band = z.value("boundary_band", c.zero_crossing.boundary_band);
    }
    c.artifact_density_bound = j.value("artifact_density_bound", c.artifact_density_bound);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("RunConfig::load: cannot open " + path.string());
    return from_json(nlohmann::json::parse(in));
}

void RunConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("RunConfig::save: cannot open " + path.string());
    out << to_json().dump(2) << '\n';
}

std::string RunConfig::calibration_hash() const {
    // FNV-1a over the canonical dump of the calibration-relevant subset.
    nlohmann::json subset = to_json();
    subset.erase("ensemble_size");
    subset.erase("master_seed");
    subset.erase("output_dir");
    subset.erase("jobs");
    const std::string dump = subset.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace somgen
