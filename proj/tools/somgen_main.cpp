// somgen: generate stochastic-object-model ensembles, evaluate candidate
// ensembles against a model's rules, and compare two ensembles.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "somgen/frechet.hpp"
#include "somgen/report.hpp"
#include "somgen/run_config.hpp"

namespace fs = std::filesystem;
using namespace somgen;

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const nlohmann::json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.get<std::string>();
}

void write_rows_csv(const EvaluationReport& report, const fs::path& path) {
    // Column set is the union over rows so externally produced ensembles with
    // partial exclusions still land in one rectangular table.
    std::set<std::string> stat_keys, pass_keys;
    for (const RealizationRow& row : report.rows) {
        for (const auto& [key, value] : row.stats.items()) stat_keys.insert(key);
        for (const auto& [key, value] : row.passes.items()) pass_keys.insert(key);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "id,path,true_class,recovered_class,exclusion";
    for (const std::string& key : stat_keys) out << ',' << key;
    for (const std::string& key : pass_keys) out << ",pass_" << key;
    out << '\n';
    for (const RealizationRow& row : report.rows) {
        out << row.id << ',' << row.path << ','
            << (row.true_class ? std::to_string(*row.true_class) : "") << ','
            << (row.recovered_class ? std::to_string(*row.recovered_class) : "") << ','
            << row.exclusion;
        for (const std::string& key : stat_keys)
            out << ',' << (row.stats.contains(key) ? csv_field(row.stats.at(key)) : "");
        for (const std::string& key : pass_keys)
            out << ',' << (row.passes.contains(key) ? csv_field(row.passes.at(key)) : "");
        out << '\n';
    }
}

void write_summary_csvs(const EvaluationReport& report, const fs::path& dir) {
    const nlohmann::json& summary = report.summary;
    if (summary.contains("prevalence")) {
        std::ofstream out(dir / "prevalence.csv");
        out << "class,fraction\n";
        const auto& fractions = summary.at("prevalence").at("fractions");
        for (std::size_t c = 0; c < fractions.size(); ++c)
            out << (c + 1) << ',' << format_double(fractions.at(c).get<double>()) << '\n';
    }
    if (summary.contains("positional_map") && !summary.at("positional_map").is_null()) {
        std::ofstream out(dir / "positional_map.csv");
        out << "position,row,col,chi2\n";
        const auto& cells = summary.at("positional_map").at("cells");
        for (std::size_t k = 0; k < cells.size(); ++k)
            out << k << ',' << k / 8 << ',' << k % 8 << ',' << csv_field(cells.at(k)) << '\n';
    }
    if (summary.contains("autocorrelation") && !summary.at("autocorrelation").is_null()) {
        std::ofstream out(dir / "autocorrelation.csv");
        out << "lag,correlation\n";
        const auto& corr = summary.at("autocorrelation").at("correlation");
        for (std::size_t k = 0; k < corr.size(); ++k)
            out << k << ',' << format_double(corr.at(k).get<double>()) << '\n';
    }
    if (summary.contains("pooled_mixture") && summary.at("pooled_mixture").contains("qq")) {
        std::ofstream out(dir / "qq.csv");
        out << "probability,observed,expected\n";
        for (const auto& probe : summary.at("pooled_mixture").at("qq"))
            out << format_double(probe.at(0).get<double>()) << ','
                << format_double(probe.at(1).get<double>()) << ','
                << format_double(probe.at(2).get<double>()) << '\n';
    }
}

void write_compare_csvs(const ComparisonReport& report, const fs::path& dir) {
    {
        std::ofstream out(dir / "qq.csv");
        out << "p,quantile_a,quantile_b\n";
        for (const auto& row : report.qq)
            out << format_double(row[0]) << ',' << format_double(row[1]) << ','
                << format_double(row[2]) << '\n';
    }
    {
        std::ofstream out(dir / "histogram.csv");
        out << "level,count_a,count_b,density_a,density_b\n";
        for (const auto& row : report.histogram)
            out << static_cast<int>(row[0]) << ',' << static_cast<std::uint64_t>(row[1]) << ','
                << static_cast<std::uint64_t>(row[2]) << ',' << format_double(row[3]) << ','
                << format_double(row[4]) << '\n';
    }
}

struct ConfigCli {
    std::string config_path;
    std::string som;
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<int> classes;
    std::vector<double> weights;
    double tolerance = 0.0;
    int calib_size = 0;
    std::uint64_t calib_seed = 0;
    std::string out_dir;
    int jobs = 0;

    CLI::Option* som_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* classes_opt = nullptr;
    CLI::Option* weights_opt = nullptr;
    CLI::Option* tolerance_opt = nullptr;
    CLI::Option* calib_size_opt = nullptr;
    CLI::Option* calib_seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* jobs_opt = nullptr;

    void attach(CLI::App& cmd, bool with_generation) {
        cmd.add_option("--config", config_path, "JSON run configuration; flags override fields");
        som_opt = cmd.add_option("--som", som, "SOM: clb, flags, voronoi, alphabet");
        if (with_generation) {
            n_opt = cmd.add_option("--n", n, "ensemble size");
            seed_opt = cmd.add_option("--seed", seed, "master seed");
            classes_opt = cmd.add_option("--classes", classes,
                                         "restrict generation to these classes (1-8)")
                              ->delimiter(',');
            weights_opt =
                cmd.add_option("--weights", weights, "per-class prevalence weights (8 values)")
                    ->delimiter(',');
            out_opt = cmd.add_option("--out", out_dir, "output directory");
        }
        tolerance_opt = cmd.add_option("--tolerance-percentile", tolerance,
                                       "calibration percentile for intensity tolerances");
        calib_size_opt = cmd.add_option("--calib-size", calib_size, "calibration ensemble size");
        calib_seed_opt = cmd.add_option("--calib-seed", calib_seed, "calibration master seed");
        jobs_opt = cmd.add_option("--jobs", jobs, "worker threads (default: SOMGEN_JOBS or cores)");
    }

    RunConfig build() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg = RunConfig::load(config_path);
        if (som_opt && som_opt->count()) cfg.som = som_kind_from_string(som);
        if (n_opt && n_opt->count()) cfg.ensemble_size = n;
        if (seed_opt && seed_opt->count()) cfg.master_seed = seed;
        if (classes_opt && classes_opt->count()) {
            std::vector<double> w(8, 0.0);
            for (int c : classes) {
                if (c < 1 || c > 8) throw CLI::ValidationError("--classes entries must be 1-8");
                w[static_cast<std::size_t>(c - 1)] = 1.0;
            }
            cfg.class_weights = w;
        }
        if (weights_opt && weights_opt->count()) cfg.class_weights = weights;
        if (tolerance_opt && tolerance_opt->count()) cfg.tolerance_percentile = tolerance;
        if (calib_size_opt && calib_size_opt->count()) cfg.calibration_size = calib_size;
        if (calib_seed_opt && calib_seed_opt->count()) cfg.calibration_seed = calib_seed;
        if (out_opt && out_opt->count()) cfg.output_dir = out_dir;
        if (jobs_opt && jobs_opt->count()) cfg.jobs = jobs;
        return cfg;
    }
};

CalibrationArtifacts load_or_build_calibration(const RunConfig& cfg, const std::string& path) {
    if (!path.empty() && fs::exists(path)) {
        CalibrationArtifacts artifacts = CalibrationArtifacts::load(path);
        if (artifacts.config_hash != cfg.calibration_hash())
            throw std::runtime_error("calibration file " + path +
                                     " was built for a different configuration; rerun "
                                     "`somgen calibrate` or drop --calib to recompute");
        return artifacts;
    }
    CalibrationArtifacts artifacts = calibrate_artifacts(cfg);
    if (!path.empty()) {
        artifacts.save(path);
        std::cout << "calibration written to " << path << "\n";
    }
    return artifacts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic object model ensemble generator and validator"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "render an ensemble and its manifest");
    ConfigCli gen_cli;
    gen_cli.attach(*generate, true);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "freeze validation thresholds from a true ensemble");
    ConfigCli cal_cli;
    cal_cli.attach(*calibrate, false);
    std::string cal_out;
    calibrate->add_option("--out", cal_out, "calibration artifact file")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "run the validators over an ensemble");
    ConfigCli eval_cli;
    eval_cli.attach(*evaluate, false);
    std::string eval_input, eval_calib, eval_report, eval_csv_dir;
    evaluate->add_option("--input", eval_input, "manifest.json or a directory of PNGs")
        ->required();
    evaluate->add_option("--calib", eval_calib,
                         "calibration artifact file (computed and cached when missing)");
    evaluate->add_option("--report", eval_report, "evaluation report JSON path")->required();
    evaluate->add_option("--csv-dir", eval_csv_dir, "also emit tidy CSV tables here");

    // compare
    auto* compare = app.add_subcommand("compare", "pooled intensity comparison of two ensembles");
    std::string cmp_a, cmp_b, cmp_features_a, cmp_features_b, cmp_report, cmp_csv_dir;
    compare->add_option("ensemble_a", cmp_a, "manifest.json or directory")->required();
    compare->add_option("ensemble_b", cmp_b, "manifest.json or directory")->required();
    compare->add_option("--features-a", cmp_features_a, "per-image feature CSV for ensemble A");
    compare->add_option("--features-b", cmp_features_b, "per-image feature CSV for ensemble B");
    compare->add_option("--report", cmp_report, "comparison report JSON path");
    compare->add_option("--csv-dir", cmp_csv_dir, "emit qq.csv and histogram.csv here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            RunConfig cfg = gen_cli.build();
            const EnsembleManifest manifest = generate_ensemble(cfg);
            std::cout << "wrote " << manifest.entries.size() << " realizations to "
                      << cfg.output_dir << "\n";
            return 0;
        }

        if (calibrate->parsed()) {
            RunConfig cfg = cal_cli.build();
            if (cfg.ensemble_size == 0) cfg.ensemble_size = cfg.calibration_size;
            cfg.validate();
            const CalibrationArtifacts artifacts = calibrate_artifacts(cfg);
            artifacts.save(cal_out);
            std::cout << "calibration written to " << cal_out << " (config hash "
                      << artifacts.config_hash << ")\n";
            return 0;
        }

        if (evaluate->parsed()) {
            RunConfig cfg = eval_cli.build();
            const std::vector<EnsembleItem> items = load_ensemble(eval_input);
            if (cfg.ensemble_size == 0) cfg.ensemble_size = static_cast<int>(items.size());
            cfg.validate();
            const CalibrationArtifacts artifacts = load_or_build_calibration(cfg, eval_calib);
            const EvaluationReport report = evaluate_ensemble(items, cfg, artifacts);
            report.save(eval_report);
            if (!eval_csv_dir.empty()) {
                fs::create_directories(eval_csv_dir);
                write_rows_csv(report, fs::path(eval_csv_dir) / "rows.csv");
                write_summary_csvs(report, eval_csv_dir);
            }
            std::cout << "evaluated " << report.summary.at("evaluated") << " realizations ("
                      << report.summary.at("excluded") << " excluded); report at " << eval_report
                      << "\n";
            return 0;
        }

        if (compare->parsed()) {
            const std::vector<EnsembleItem> a = load_ensemble(cmp_a);
            const std::vector<EnsembleItem> b = load_ensemble(cmp_b);
            std::vector<std::vector<double>> features_a, features_b;
            if (!cmp_features_a.empty()) features_a = load_feature_csv(cmp_features_a);
            if (!cmp_features_b.empty()) features_b = load_feature_csv(cmp_features_b);
            const ComparisonReport report =
                compare_ensembles(a, b, features_a, features_b);
            if (!cmp_report.empty()) report.save(cmp_report);
            if (!cmp_csv_dir.empty()) {
                fs::create_directories(cmp_csv_dir);
                write_compare_csvs(report, cmp_csv_dir);
            }
            std::cout << "max QQ gap " << format_double(report.max_qq_gap);
            if (report.frechet) std::cout << ", Frechet distance " << format_double(*report.frechet);
            std::cout << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "somgen: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
