#include "somgen/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "somgen/alphabet.hpp"
#include "somgen/clb.hpp"
#include "somgen/flag_templates.hpp"
#include "somgen/flags.hpp"
#include "somgen/histogram.hpp"
#include "somgen/parallel.hpp"
#include "somgen/png_io.hpp"
#include "somgen/rank_stats.hpp"
#include "somgen/region_detect.hpp"
#include "somgen/voronoi.hpp"
#include "somgen/zero_crossings.hpp"

#include "somgen/frechet.hpp"

namespace somgen {

namespace {

// Statistics can legitimately be +inf (e.g. an empty pixel population);
// JSON has no such literal, so non-finite values serialize as strings.
nlohmann::json finite_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

constexpr std::uint64_t kLabelStreamIndex = ~0ULL;

bool som_has_classes(SomKind som) { return som == SomKind::flags || som == SomKind::voronoi; }

std::vector<int> draw_labels(const RunConfig& config, int n_classes) {
    const std::vector<double> weights = config.effective_weights(n_classes);
    double total = 0.0;
    for (double w : weights) total += w;
    RngStream rng(derive_stream_seed(config.master_seed, kLabelStreamIndex));
    std::vector<int> labels(static_cast<std::size_t>(config.ensemble_size));
    for (int& label : labels) {
        const double u = rng.uniform() * total;
        double cum = 0.0;
        label = n_classes; // guards against floating-point slack at u ~ total
        for (int c = 0; c < n_classes; ++c) {
            cum += weights[static_cast<std::size_t>(c)];
            if (u < cum) {
                label = c + 1;
                break;
            }
        }
    }
    return labels;
}

GrayImage render_realization(const RunConfig& config, SomKind som, int label,
                             std::uint64_t stream_seed, const FlagTemplateSet& templates,
                             const GlyphSet& glyphs) {
    RngStream stream(stream_seed);
    switch (som) {
        case SomKind::flags:
            return generate_flags(label, stream, templates, config.flags_model);
        case SomKind::voronoi:
            return generate_voronoi(label, stream).image;
        case SomKind::alphabet:
            return render_alphabet(arrange_sequence(config.alphabet_rules, stream), glyphs);
        case SomKind::clb:
            return generate_clb(config.clb_params, stream);
        case SomKind::external:
            break;
    }
    throw std::invalid_argument("cannot generate an external ensemble");
}

nlohmann::json generation_params_json(const RunConfig& config) {
    nlohmann::json j = config.to_json();
    j.erase("output_dir"); // manifests must stay relocatable
    j.erase("jobs");
    return j;
}

/// Fraction of rows whose passes[key] is true, over rows carrying that key.
nlohmann::json pass_rate(const std::vector<RealizationRow>& rows, const char* key) {
    std::int64_t have = 0, pass = 0;
    for (const RealizationRow& row : rows) {
        if (!row.exclusion.empty() || !row.passes.contains(key)) continue;
        ++have;
        if (row.passes.at(key).get<bool>()) ++pass;
    }
    if (have == 0) return nullptr;
    return static_cast<double>(pass) / static_cast<double>(have);
}

std::int64_t excluded_count(const std::vector<RealizationRow>& rows) {
    std::int64_t n = 0;
    for (const RealizationRow& row : rows)
        if (!row.exclusion.empty()) ++n;
    return n;
}

bool check_dimensions(const EnsembleItem& item, RealizationRow& row) {
    if (!item.error.empty()) {
        row.exclusion = item.error;
        return false;
    }
    if (item.image.width != kRealizationSize || item.image.height != kRealizationSize) {
        row.exclusion = "wrong dimensions";
        return false;
    }
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// Calibration artifacts

nlohmann::json CalibrationArtifacts::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["som"] = to_string(som);
    j["config_hash"] = config_hash;
    j["tolerance_percentile"] = tolerance_percentile;
    j["fg_threshold"] = fg_threshold;
    j["bg_threshold"] = bg_threshold;
    j["mean_counts"] = mean_counts;
    j["count_bins"] = count_bins;
    nlohmann::json probs = nlohmann::json::array();
    for (const auto& row : positional_probs) probs.push_back(row);
    j["positional_probs"] = std::move(probs);
    j["positional_sequences"] = positional_sequences;
    return j;
}

CalibrationArtifacts CalibrationArtifacts::from_json(const nlohmann::json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion)
        throw std::runtime_error("calibration artifacts: unsupported schema version");
    CalibrationArtifacts a;
    a.som = som_kind_from_string(j.at("som").get<std::string>());
    a.config_hash = j.at("config_hash").get<std::string>();
    a.tolerance_percentile = j.at("tolerance_percentile").get<double>();
    a.fg_threshold = j.at("fg_threshold").get<double>();
    a.bg_threshold = j.at("bg_threshold").get<double>();
    a.mean_counts = j.at("mean_counts").get<std::vector<double>>();
    a.count_bins = j.at("count_bins").get<std::vector<double>>();
    const auto& probs = j.at("positional_probs");
    for (std::size_t k = 0; k < a.positional_probs.size(); ++k)
        for (std::size_t l = 0; l < a.positional_probs[k].size(); ++l)
            a.positional_probs[k][l] = probs.at(k).at(l).get<double>();
    a.positional_sequences = j.at("positional_sequences").get<std::int64_t>();
    return a;
}

void CalibrationArtifacts::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("calibration save: cannot open " + path.string());
    out << to_json().dump(2) << '\n';
}

CalibrationArtifacts CalibrationArtifacts::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("calibration load: cannot open " + path.string());
    return from_json(nlohmann::json::parse(in));
}

CalibrationArtifacts calibrate_artifacts(const RunConfig& config) {
    CalibrationArtifacts artifacts;
    artifacts.som = config.som;
    artifacts.config_hash = config.calibration_hash();
    artifacts.tolerance_percentile = config.tolerance_percentile;

    RunConfig calib = config;
    calib.ensemble_size = config.calibration_size;
    calib.master_seed = config.calibration_seed;
    // Count bins and positional references need every class represented, so
    // calibration always draws a uniform mix regardless of the run's weights.
    calib.class_weights.clear();

    switch (config.som) {
        case SomKind::flags: {
            const FlagTemplateSet templates = FlagTemplateSet::canonical();
            const std::vector<EnsembleItem> items = generate_in_memory(calib);
            std::vector<double> fg_stats(items.size()), bg_stats(items.size());
            parallel_for(items.size(), config.jobs, [&](std::size_t i) {
                const FlagsRecovery rec =
                    classify_flags(items[i].image, templates, config.flags_model);
                const PixelSplit split = split_pixels(items[i].image, rec, config.flags_model);
                fg_stats[i] =
                    chi_square_gof(split.foreground, config.flags_model.foreground).statistic;
                bg_stats[i] =
                    chi_square_gof(split.background, config.flags_model.background).statistic;
            });
            artifacts.fg_threshold =
                calibrate_tolerance(fg_stats, config.tolerance_percentile).threshold;
            artifacts.bg_threshold =
                calibrate_tolerance(bg_stats, config.tolerance_percentile).threshold;
            break;
        }
        case SomKind::voronoi: {
            const std::vector<EnsembleItem> items = generate_in_memory(calib);
            std::vector<int> counts(items.size());
            parallel_for(items.size(), config.jobs, [&](std::size_t i) {
                counts[i] = detect_regions(items[i].image, config.detection).region_count;
            });
            std::vector<double> sum(8, 0.0);
            std::vector<int> n(8, 0);
            for (std::size_t i = 0; i < items.size(); ++i) {
                const int c = *items[i].class_label;
                sum[static_cast<std::size_t>(c - 1)] += counts[i];
                ++n[static_cast<std::size_t>(c - 1)];
            }
            artifacts.mean_counts.resize(8);
            for (int c = 0; c < 8; ++c) {
                if (n[static_cast<std::size_t>(c)] == 0)
                    throw std::runtime_error(
                        "calibration ensemble too small: class " + std::to_string(c + 1) +
                        " unrepresented");
                artifacts.mean_counts[static_cast<std::size_t>(c)] =
                    sum[static_cast<std::size_t>(c)] / n[static_cast<std::size_t>(c)];
            }
            artifacts.count_bins = calibrate_count_bins(artifacts.mean_counts);
            break;
        }
        case SomKind::alphabet: {
            // The reference distribution needs at least 10^4 sequences; the
            // true render->classify round trip is exact, so the sequences are
            // drawn directly.
            const int n = std::max(config.calibration_size, 10000);
            std::vector<LetterSequence> sequences;
            sequences.reserve(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                RngStream rng = RngStream::from_master(config.calibration_seed,
                                                       static_cast<std::uint64_t>(i));
                sequences.push_back(arrange_sequence(config.alphabet_rules, rng));
            }
            const PositionalReference reference = positional_reference(sequences);
            artifacts.positional_probs = reference.probs;
            artifacts.positional_sequences = reference.sequences;
            break;
        }
        case SomKind::clb:
            break; // normalization is frozen inside the parameters
        case SomKind::external:
            throw std::invalid_argument("cannot calibrate the external pseudo-SOM");
    }
    return artifacts;
}

// ---------------------------------------------------------------------------
// Generation

std::vector<EnsembleItem> generate_in_memory(const RunConfig& config) {
    config.validate();
    const FlagTemplateSet templates =
        config.som == SomKind::flags ? FlagTemplateSet::canonical() : FlagTemplateSet();
    const GlyphSet glyphs = config.som == SomKind::alphabet ? GlyphSet::builtin() : GlyphSet();

    std::vector<int> labels;
    if (som_has_classes(config.som)) labels = draw_labels(config, 8);

    std::vector<EnsembleItem> items(static_cast<std::size_t>(config.ensemble_size));
    parallel_for(items.size(), config.jobs, [&](std::size_t i) {
        EnsembleItem& item = items[i];
        item.id = static_cast<int>(i);
        item.seed = derive_stream_seed(config.master_seed, static_cast<std::uint64_t>(i));
        if (!labels.empty()) item.class_label = labels[i];
        char name[64];
        std::snprintf(name, sizeof name, "%s_%05d.png", to_string(config.som).c_str(),
                      item.id);
        item.path = name;
        item.image = render_realization(config, config.som, item.class_label.value_or(0),
                                        *item.seed, templates, glyphs);
    });
    return items;
}

EnsembleManifest generate_ensemble(const RunConfig& config) {
    if (config.output_dir.empty())
        throw std::invalid_argument("generate_ensemble: output_dir is required");
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);

    const std::vector<EnsembleItem> items = generate_in_memory(config);

    EnsembleManifest manifest;
    manifest.som_name = config.som;
    manifest.master_seed = config.master_seed;
    manifest.generation_params = generation_params_json(config);
    manifest.entries.reserve(items.size());
    for (const EnsembleItem& item : items) {
        save_image(item.image, dir / item.path);
        manifest.entries.push_back({item.path, item.class_label, *item.seed});
    }
    manifest.save(dir / "manifest.json");
    return manifest;
}

GrayImage regenerate_entry(const EnsembleManifest& manifest, const ManifestEntry& entry) {
    const RunConfig config = RunConfig::from_json(manifest.generation_params);
    const FlagTemplateSet templates =
        manifest.som_name == SomKind::flags ? FlagTemplateSet::canonical() : FlagTemplateSet();
    const GlyphSet glyphs =
        manifest.som_name == SomKind::alphabet ? GlyphSet::builtin() : GlyphSet();
    return render_realization(config, manifest.som_name, entry.class_label.value_or(0),
                              entry.seed, templates, glyphs);
}

std::vector<EnsembleItem> load_ensemble(const std::filesystem::path& manifest_or_dir) {
    std::vector<EnsembleItem> items;
    if (std::filesystem::is_directory(manifest_or_dir)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(manifest_or_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        items.resize(files.size());
        for (std::size_t i = 0; i < files.size(); ++i) {
            items[i].id = static_cast<int>(i);
            items[i].path = files[i].filename().string();
            try {
                items[i].image = load_image(files[i]);
            } catch (const std::exception& e) {
                items[i].error = e.what();
            }
        }
        return items;
    }

    const EnsembleManifest manifest = EnsembleManifest::load(manifest_or_dir);
    items.resize(manifest.entries.size());
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const ManifestEntry& entry = manifest.entries[i];
        items[i].id = static_cast<int>(i);
        items[i].path = entry.path;
        items[i].class_label = entry.class_label;
        items[i].seed = entry.seed;
        try {
            items[i].image = load_image(EnsembleManifest::resolve_entry(manifest_or_dir, entry));
        } catch (const std::exception& e) {
            items[i].error = e.what();
        }
    }
    return items;
}

// ---------------------------------------------------------------------------
// Evaluation

nlohmann::json RealizationRow::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["path"] = path;
    j["true_class"] = true_class ? nlohmann::json(*true_class) : nlohmann::json(nullptr);
    j["recovered_class"] =
        recovered_class ? nlohmann::json(*recovered_class) : nlohmann::json(nullptr);
    j["stats"] = stats;
    j["passes"] = passes;
    j["exclusion"] = exclusion;
    return j;
}

nlohmann::json EvaluationReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["som"] = to_string(som);
    j["config_hash"] = config_hash;
    j["calibration"] = calibration;
    nlohmann::json rows_json = nlohmann::json::array();
    for (const RealizationRow& row : rows) rows_json.push_back(row.to_json());
    j["rows"] = std::move(rows_json);
    j["summary"] = summary;
    return j;
}

void EvaluationReport::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("report save: cannot open " + path.string());
    out << to_json().dump(2) << '\n';
}

namespace {

void evaluate_flags(const std::vector<EnsembleItem>& items, const RunConfig& config,
                    const CalibrationArtifacts& calibration, EvaluationReport& report) {
    const FlagTemplateSet templates = FlagTemplateSet::canonical();
    const std::bitset<256> forbidden = templates.never_foreground();
    const FlagsModel& model = config.flags_model;

    std::vector<FlagsRecovery> recoveries(items.size());
    parallel_for(items.size(), config.jobs, [&](std::size_t i) {
        RealizationRow& row = report.rows[i];
        if (!check_dimensions(items[i], row)) return;
        const GrayImage& image = items[i].image;

        const FlagsRecovery rec = classify_flags(image, templates, model);
        recoveries[i] = rec;
        row.recovered_class = rec.class_id;
        row.stats["template_mae"] = rec.template_mae;
        row.passes["perfect_match"] = rec.perfect_match;
        row.passes["forbidden_clear"] = (rec.recovered_foreground & forbidden).none();
        if (row.true_class) row.passes["class_match"] = rec.class_id == *row.true_class;

        const IntensityValidation intensity = validate_intensities(
            image, rec, calibration.fg_threshold, calibration.bg_threshold, model);
        row.stats["fg_chi2"] = finite_json(intensity.fg_statistic);
        row.stats["bg_chi2"] = finite_json(intensity.bg_statistic);
        row.passes["fg_intensity"] = intensity.fg_pass;
        row.passes["bg_intensity"] = intensity.bg_pass;

        const RandomnessValidation moran =
            validate_randomness(image, config.randomness, model.tile_size);
        row.stats["moran_violations"] = moran.violating_tiles;
        row.passes["randomness"] = moran.pass;
    });

    // Pooled pixels against the analytic foreground/background mixture.
    const double fg_weight =
        static_cast<double>(FlagTemplateSet::kForegroundCells) /
        (FlagTemplateSet::kGridSize * FlagTemplateSet::kGridSize);
    const MixturePmf mixture = mixture_pmf(model.foreground, fg_weight, model.background);
    std::vector<std::uint64_t> pooled(mixture.probs.size(), 0);
    std::int64_t out_of_support = 0;
    std::vector<int> recovered_labels;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!report.rows[i].exclusion.empty()) continue;
        recovered_labels.push_back(recoveries[i].class_id);
        for (std::uint8_t p : items[i].image.pixels) {
            const int idx = static_cast<int>(p) - mixture.min_value;
            if (idx < 0 || idx >= static_cast<int>(pooled.size()))
                ++out_of_support;
            else
                ++pooled[static_cast<std::size_t>(idx)];
        }
    }

    nlohmann::json summary;
    summary["evaluated"] = static_cast<std::int64_t>(recovered_labels.size());
    summary["excluded"] = excluded_count(report.rows);
    summary["pass_rates"] = {{"perfect_match", pass_rate(report.rows, "perfect_match")},
                             {"forbidden_clear", pass_rate(report.rows, "forbidden_clear")},
                             {"class_match", pass_rate(report.rows, "class_match")},
                             {"fg_intensity", pass_rate(report.rows, "fg_intensity")},
                             {"bg_intensity", pass_rate(report.rows, "bg_intensity")},
                             {"randomness", pass_rate(report.rows, "randomness")}};
    if (!recovered_labels.empty()) {
        const PrevalenceSummary prev = class_prevalence(recovered_labels);
        summary["prevalence"] = {{"fractions", prev.fractions}, {"stddev", prev.stddev}};

        ChiSquareResult pooled_gof = chi_square_gof(pooled, mixture.probs);
        const double threshold =
            chi_square_quantile(config.tolerance_percentile, pooled_gof.dof);
        double max_gap = 0.0;
        const int probes = 512;
        nlohmann::json qq = nlohmann::json::array();
        for (int i = 0; i < probes; ++i) {
            const double p = (i + 0.5) / probes;
            const double observed = histogram_quantile(pooled, mixture.min_value, p);
            const double expected = mixture_quantile(mixture, p);
            max_gap = std::max(max_gap, std::fabs(observed - expected));
            qq.push_back({p, observed, expected});
        }
        summary["pooled_mixture"] = {{"chi2", finite_json(pooled_gof.statistic)},
                                     {"dof", pooled_gof.dof},
                                     {"threshold", threshold},
                                     {"chi2_pass", pooled_gof.statistic <= threshold},
                                     {"qq_max_gap", max_gap},
                                     {"qq", std::move(qq)},
                                     {"out_of_support", out_of_support}};
    }
    report.summary = std::move(summary);
}

void evaluate_voronoi(const std::vector<EnsembleItem>& items, const RunConfig& config,
                      const CalibrationArtifacts& calibration, EvaluationReport& report) {
    parallel_for(items.size(), config.jobs, [&](std::size_t i) {
        RealizationRow& row = report.rows[i];
        if (!check_dimensions(items[i], row)) return;
        const GrayImage& image = items[i].image;

        const RegionMap map = detect_regions(image, config.detection);
        row.stats["region_count"] = map.region_count;
        row.recovered_class = class_from_count(map.region_count, calibration.count_bins);

        std::vector<double> areas, shades;
        areas.reserve(map.regions.size());
        shades.reserve(map.regions.size());
        for (const RegionRecord& r : map.regions) {
            areas.push_back(r.area);
            shades.push_back(r.shade);
        }
        const SpearmanResult rho = spearman_rho(areas, shades);
        row.stats["area_shade_rho"] = rho.defined ? nlohmann::json(rho.rho) : nlohmann::json(nullptr);

        const ZeroCrossingResult zc = laplacian_zero_crossings(image, config.zero_crossing);
        row.stats["zero_crossing_density"] = zc.interior_density;
        row.passes["artifact_clean"] = zc.interior_density < config.artifact_density_bound;

        if (row.true_class && items[i].seed) {
            RngStream stream(*items[i].seed);
            const VoronoiRealization truth = generate_voronoi(*row.true_class, stream);
            row.stats["true_region_count"] = truth.map.region_count;
            row.passes["count_within_1"] =
                std::abs(map.region_count - truth.map.region_count) <= 1;
            row.passes["class_match"] = *row.recovered_class == *row.true_class;
        }
    });

    double rho_sum = 0.0;
    std::int64_t rho_n = 0;
    std::vector<int> recovered_labels;
    for (const RealizationRow& row : report.rows) {
        if (!row.exclusion.empty()) continue;
        recovered_labels.push_back(*row.recovered_class);
        if (!row.stats.at("area_shade_rho").is_null()) {
            rho_sum += row.stats.at("area_shade_rho").get<double>();
            ++rho_n;
        }
    }

    nlohmann::json summary;
    summary["evaluated"] = static_cast<std::int64_t>(recovered_labels.size());
    summary["excluded"] = excluded_count(report.rows);
    summary["mean_area_shade_rho"] =
        rho_n > 0 ? nlohmann::json(rho_sum / static_cast<double>(rho_n)) : nlohmann::json(nullptr);
    summary["pass_rates"] = {{"artifact_clean", pass_rate(report.rows, "artifact_clean")},
                             {"count_within_1", pass_rate(report.rows, "count_within_1")},
                             {"class_match", pass_rate(report.rows, "class_match")}};
    if (!recovered_labels.empty()) {
        const PrevalenceSummary prev = class_prevalence(recovered_labels);
        summary["prevalence"] = {{"fractions", prev.fractions}, {"stddev", prev.stddev}};
    }
    report.summary = std::move(summary);
}

void evaluate_alphabet(const std::vector<EnsembleItem>& items, const RunConfig& config,
                       const CalibrationArtifacts& calibration, EvaluationReport& report) {
    const GlyphSet glyphs = GlyphSet::builtin();
    std::vector<LetterSequence> decoded(items.size());

    parallel_for(items.size(), config.jobs, [&](std::size_t i) {
        RealizationRow& row = report.rows[i];
        if (!check_dimensions(items[i], row)) return;

        const LetterSequence seq = classify_letters(items[i].image, glyphs);
        decoded[i] = seq;
        double max_uncertainty = 0.0;
        std::string sequence_text;
        sequence_text.reserve(seq.tokens.size());
        for (const LetterToken& t : seq.tokens) {
            max_uncertainty = std::max(max_uncertainty, t.uncertainty);
            const char c = letter_char(t.letter);
            // lowercase marks an excluded (uncertain) token
            sequence_text.push_back(t.excluded ? static_cast<char>(c - 'A' + 'a') : c);
        }
        row.stats["sequence"] = sequence_text;
        row.stats["excluded_tokens"] = seq.excluded_count();
        row.stats["max_uncertainty"] = max_uncertainty;

        try {
            const FrequencyTestResult freq = frequency_test(seq, config.alphabet_rules);
            row.stats["frequency_chi2"] = finite_json(freq.chi2);
            row.passes["exact_match"] = freq.exact_match;
            row.passes["decodable"] = true;
        } catch (const std::runtime_error&) {
            row.passes["decodable"] = false; // too many excluded tokens
        }

        const PairPrevalence pairs = pair_prevalence(seq);
        row.stats["hv_pairs"] = pairs.hv;
        row.stats["wy_pairs"] = pairs.wy;
        row.stats["hz_pairs"] = pairs.hz_unordered;
        row.stats["lone_v"] = pairs.lone_v;
        row.stats["lone_y"] = pairs.lone_y;
        row.passes["pairs_ok"] = pairs.hv == config.alphabet_rules.hv_pairs &&
                                 pairs.wy == config.alphabet_rules.wy_pairs &&
                                 pairs.hz_unordered >= config.alphabet_rules.min_hz_pairs &&
                                 pairs.lone_v == 0 && pairs.lone_y == 0;
    });

    std::vector<LetterSequence> usable;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (report.rows[i].exclusion.empty()) usable.push_back(decoded[i]);

    nlohmann::json summary;
    summary["evaluated"] = static_cast<std::int64_t>(usable.size());
    summary["excluded"] = excluded_count(report.rows);
    summary["pass_rates"] = {{"exact_match", pass_rate(report.rows, "exact_match")},
                             {"pairs_ok", pass_rate(report.rows, "pairs_ok")},
                             {"decodable", pass_rate(report.rows, "decodable")}};
    if (!usable.empty()) {
        const HzDistribution hz = hz_distribution(usable, config.alphabet_rules.min_hz_pairs);
        summary["hz_distribution"] = {{"mean", hz.mean},
                                      {"stddev", hz.stddev},
                                      {"min_count", hz.min_count},
                                      {"violations", hz.violations}};
        if (calibration.positional_sequences > 0) {
            PositionalReference reference;
            reference.probs = calibration.positional_probs;
            reference.sequences = calibration.positional_sequences;
            const auto map = positional_error_map(usable, reference);
            const double critical = chi_square_quantile(0.99, kLetterCount - 1);
            int below = 0;
            nlohmann::json cells = nlohmann::json::array();
            for (double chi2 : map) {
                cells.push_back(finite_json(chi2));
                if (chi2 < critical) ++below;
            }
            summary["positional_map"] = {{"cells", std::move(cells)},
                                         {"critical_chi2_99", critical},
                                         {"cells_below_critical", below}};
        }
    }
    report.summary = std::move(summary);
}

void evaluate_clb(const std::vector<EnsembleItem>& items, const RunConfig& config,
                  EvaluationReport& report) {
    parallel_for(items.size(), config.jobs, [&](std::size_t i) {
        RealizationRow& row = report.rows[i];
        if (!check_dimensions(items[i], row)) return;
        const GrayImage& image = items[i].image;

        double sum = 0.0, sum2 = 0.0;
        int lo = 255, hi = 0;
        for (std::uint8_t p : image.pixels) {
            sum += p;
            sum2 += static_cast<double>(p) * p;
            lo = std::min<int>(lo, p);
            hi = std::max<int>(hi, p);
        }
        const double n = static_cast<double>(image.pixels.size());
        const double mean = sum / n;
        row.stats["mean"] = mean;
        row.stats["stddev"] = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
        row.stats["min"] = lo;
        row.stats["max"] = hi;
    });

    std::vector<const GrayImage*> usable;
    double mean_sum = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!report.rows[i].exclusion.empty()) continue;
        usable.push_back(&items[i].image);
        mean_sum += report.rows[i].stats.at("mean").get<double>();
    }

    nlohmann::json summary;
    summary["evaluated"] = static_cast<std::int64_t>(usable.size());
    summary["excluded"] = excluded_count(report.rows);
    summary["ensemble_mean"] = usable.empty()
                                   ? nlohmann::json(nullptr)
                                   : nlohmann::json(mean_sum / static_cast<double>(usable.size()));
    if (usable.size() >= 100) {
        std::vector<GrayImage> ensemble;
        ensemble.reserve(usable.size());
        for (const GrayImage* img : usable) ensemble.push_back(*img);
        const RadialAutocorrelation ac = radial_autocorrelation(ensemble, 12);
        bool monotone = true;
        for (std::size_t k = 1; k <= 10 && k < ac.correlation.size(); ++k)
            if (ac.correlation[k] > ac.correlation[k - 1] + 1e-12) monotone = false;
        summary["autocorrelation"] = {{"correlation", ac.correlation},
                                      {"degenerate", ac.degenerate},
                                      {"monotone_first_10", monotone}};
    } else {
        summary["autocorrelation"] = nullptr; // needs at least 100 realizations
    }
    report.summary = std::move(summary);
}

} // namespace

EvaluationReport evaluate_ensemble(const std::vector<EnsembleItem>& items,
                                   const RunConfig& config,
                                   const CalibrationArtifacts& calibration) {
    if (calibration.som != config.som)
        throw std::invalid_argument("evaluate_ensemble: calibration built for a different SOM");
    if (calibration.config_hash != config.calibration_hash())
        throw std::invalid_argument(
            "evaluate_ensemble: calibration does not match this configuration (stale cache?)");

    EvaluationReport report;
    report.som = config.som;
    report.config_hash = calibration.config_hash;
    report.calibration = calibration.to_json();
    report.rows.resize(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        report.rows[i].id = items[i].id;
        report.rows[i].path = items[i].path;
        report.rows[i].true_class = items[i].class_label;
    }

    switch (config.som) {
        case SomKind::flags:
            evaluate_flags(items, config, calibration, report);
            break;
        case SomKind::voronoi:
            evaluate_voronoi(items, config, calibration, report);
            break;
        case SomKind::alphabet:
            evaluate_alphabet(items, config, calibration, report);
            break;
        case SomKind::clb:
            evaluate_clb(items, config, report);
            break;
        case SomKind::external:
            throw std::invalid_argument("evaluate_ensemble: som must name a concrete model");
    }
    return report;
}

// ---------------------------------------------------------------------------
// Comparison

nlohmann::json ComparisonReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["n_a"] = n_a;
    j["n_b"] = n_b;
    j["max_qq_gap"] = max_qq_gap;
    nlohmann::json qq_json = nlohmann::json::array();
    for (const auto& row : qq)
        qq_json.push_back({{"p", row[0]}, {"quantile_a", row[1]}, {"quantile_b", row[2]}});
    j["qq"] = std::move(qq_json);
    nlohmann::json hist_json = nlohmann::json::array();
    for (const auto& row : histogram)
        hist_json.push_back({{"level", row[0]},
                             {"count_a", row[1]},
                             {"count_b", row[2]},
                             {"density_a", row[3]},
                             {"density_b", row[4]}});
    j["histogram"] = std::move(hist_json);
    j["frechet"] = frechet ? nlohmann::json(*frechet) : nlohmann::json(nullptr);
    return j;
}

void ComparisonReport::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("comparison save: cannot open " + path.string());
    out << to_json().dump(2) << '\n';
}

ComparisonReport compare_ensembles(const std::vector<EnsembleItem>& a,
                                   const std::vector<EnsembleItem>& b,
                                   const std::vector<std::vector<double>>& features_a,
                                   const std::vector<std::vector<double>>& features_b,
                                   int qq_probes) {
    auto pool = [](const std::vector<EnsembleItem>& items) {
        std::vector<std::uint64_t> counts(256, 0);
        std::int64_t n = 0;
        for (const EnsembleItem& item : items) {
            if (!item.error.empty()) continue;
            ++n;
            for (std::uint8_t p : item.image.pixels) ++counts[p];
        }
        return std::pair(counts, n);
    };
    const auto [counts_a, n_a] = pool(a);
    const auto [counts_b, n_b] = pool(b);
    if (n_a == 0 || n_b == 0)
        throw std::invalid_argument("compare_ensembles: both ensembles need readable images");

    ComparisonReport report;
    report.n_a = static_cast<int>(n_a);
    report.n_b = static_cast<int>(n_b);

    for (int i = 0; i < qq_probes; ++i) {
        const double p = (i + 0.5) / qq_probes;
        const double qa = histogram_quantile(counts_a, 0, p);
        const double qb = histogram_quantile(counts_b, 0, p);
        report.qq.push_back({p, qa, qb});
        report.max_qq_gap = std::max(report.max_qq_gap, std::fabs(qa - qb));
    }

    double total_a = 0.0, total_b = 0.0;
    for (int v = 0; v < 256; ++v) {
        total_a += static_cast<double>(counts_a[static_cast<std::size_t>(v)]);
        total_b += static_cast<double>(counts_b[static_cast<std::size_t>(v)]);
    }
    for (int v = 0; v < 256; ++v) {
        const double ca = static_cast<double>(counts_a[static_cast<std::size_t>(v)]);
        const double cb = static_cast<double>(counts_b[static_cast<std::size_t>(v)]);
        report.histogram.push_back(
            {static_cast<double>(v), ca, cb, ca / total_a, cb / total_b});
    }

    if (!features_a.empty() || !features_b.empty()) {
        if (features_a.empty() || features_b.empty())
            throw std::invalid_argument("compare_ensembles: features must come in pairs");
        report.frechet =
            frechet_distance(summarize_features(features_a), summarize_features(features_b));
    }
    return report;
}

} // namespace somgen
