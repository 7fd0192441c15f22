#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpego/report.hpp"

namespace {

using mpego::report::EvaluationConfig;

struct DatasetFlagState {
    bool tsv = false;
    std::string baseline_generated;
    std::string schema;
    std::size_t subsample = 0;
    CLI::Option* subsample_opt = nullptr;
};

void add_dataset_flags(CLI::App* cmd, EvaluationConfig& cfg, DatasetFlagState& st) {
    cmd->add_option("--generated", cfg.generated, "Generated sample table(s), CSV/TSV with header")
        ->required();
    cmd->add_option("--reference", cfg.reference, "Reference (training) sample table");
    cmd->add_option("--baseline-generated", st.baseline_generated,
                    "Second generated table for a head-to-head comparison");
    cmd->add_option("--schema", st.schema, "Schema sidecar (JSON: column -> binary|categorical|continuous)");
    cmd->add_flag("--tsv", st.tsv, "Tab-delimited input (default comma)");
    cmd->add_flag("--drop-incomplete", cfg.drop_incomplete, "Drop rows with missing cells instead of failing");
    st.subsample_opt =
        cmd->add_option("--subsample", st.subsample, "Subsample each table to this many rows before analysis");
    cmd->add_option("--seed", cfg.seed, "Master seed for every random choice");
    cmd->add_flag("--balance", cfg.balance, "Subsample the larger population down to the smaller");
}

void apply_dataset_flags(EvaluationConfig& cfg, const DatasetFlagState& st) {
    if (st.tsv) cfg.delimiter = '\t';
    if (!st.baseline_generated.empty()) cfg.generated_baseline = st.baseline_generated;
    if (!st.schema.empty()) cfg.schema_path = st.schema;
    if (st.subsample_opt && st.subsample_opt->count() > 0) cfg.subsample = st.subsample;
}

void add_binning_flags(CLI::App* cmd, EvaluationConfig& cfg, std::string& discretizer, std::string& bin_fit) {
    cmd->add_option("--discretizer", discretizer, "equal-width|equal-frequency|kmeans (default equal-frequency)");
    cmd->add_option("--bins", cfg.bins, "Strata per continuous feature (default 5)");
    cmd->add_option("--bin-fit", bin_fit, "Population the bins are fit on: pooled|reference");
}

void add_output_flags(CLI::App* cmd, EvaluationConfig& cfg) {
    cmd->add_option("--out", cfg.out_json, "JSON report path");
    cmd->add_option("--markdown", cfg.out_markdown, "Markdown report path");
    cmd->add_option("--histograms", cfg.out_histograms, "Histogram CSV path");
}

std::vector<mpego::hie::GroupSpec> load_groups(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mpego::ConfigError("cannot open groups file: " + path);
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw mpego::ConfigError(std::string("groups file parse error: ") + e.what());
    }
    if (!doc.is_object()) throw mpego::ConfigError("groups file must be a JSON object of name -> [features]");
    std::vector<mpego::hie::GroupSpec> groups;
    for (const auto& [name, members] : doc.items())
        groups.push_back({name, members.get<std::vector<std::string>>()});
    return groups;
}

void finish_config(EvaluationConfig& cfg, const std::string& discretizer,
                   const std::string& bin_fit, const std::string& measure,
                   const std::string& weights, const std::string& groups_path) {
    if (!discretizer.empty()) cfg.discretizer = mpego::discretize::method_from_name(discretizer);
    if (!bin_fit.empty()) {
        if (bin_fit == "pooled")
            cfg.bin_fit = mpego::discretize::FitPopulation::pooled;
        else if (bin_fit == "reference")
            cfg.bin_fit = mpego::discretize::FitPopulation::reference;
        else
            throw mpego::ConfigError("unknown --bin-fit '" + bin_fit + "' (expected pooled|reference)");
    }
    if (!measure.empty()) {
        cfg.measures_list = measure == "all"
                                ? mpego::measures::all_measures()
                                : std::vector{mpego::measures::measure_from_name(measure)};
    }
    if (!weights.empty()) cfg.weights = mpego::hie::weight_scheme_from_name(weights);
    if (!groups_path.empty()) cfg.groups = load_groups(groups_path);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"mpego: independence scoring and generation-frequency analysis for sample tables"};
    app.require_subcommand(1);

    // ---- hie -------------------------------------------------------------
    EvaluationConfig hie_cfg;
    DatasetFlagState hie_ds;
    std::string hie_discretizer, hie_bin_fit, hie_measure, hie_weights, hie_groups;
    auto* hie_cmd = app.add_subcommand("hie", "Hierarchical independence scores (SIS/FIS/SAFIS/GAFIS)");
    add_dataset_flags(hie_cmd, hie_cfg, hie_ds);
    add_binning_flags(hie_cmd, hie_cfg, hie_discretizer, hie_bin_fit);
    hie_cmd->add_option("--measure", hie_measure,
                        "Objective measure, or 'all' for one score set per measure");
    hie_cmd->add_option("--weights", hie_weights, "uniform|support-weighted");
    hie_cmd->add_option("--groups", hie_groups, "JSON file naming SAFIS groups");
    add_output_flags(hie_cmd, hie_cfg);

    // ---- gfa -------------------------------------------------------------
    EvaluationConfig gfa_cfg;
    DatasetFlagState gfa_ds;
    std::string gfa_discretizer, gfa_bin_fit, gfa_direction;
    auto* gfa_cmd = app.add_subcommand("gfa", "Scan for the most over-/under-generated subgroup");
    add_dataset_flags(gfa_cmd, gfa_cfg, gfa_ds);
    add_binning_flags(gfa_cmd, gfa_cfg, gfa_discretizer, gfa_bin_fit);
    gfa_cmd->add_option("--direction", gfa_direction, "over|under (default over)");
    gfa_cmd->add_option("--restarts", gfa_cfg.restarts, "Random restarts (default 10)");
    gfa_cmd->add_option("--permutations", gfa_cfg.permutations, "Permutations for the empirical p-value (default 99)");
    gfa_cmd->add_option("--min-size", gfa_cfg.min_subset_size, "Minimum subgroup size (default 1)");
    add_output_flags(gfa_cmd, gfa_cfg);

    // ---- run -------------------------------------------------------------
    std::string run_config_path;
    std::string run_measure, run_discretizer;
    EvaluationConfig run_overrides;
    auto* run_cmd = app.add_subcommand("run", "Execute a full evaluation from a JSON config");
    run_cmd->add_option("--config", run_config_path, "JSON configuration file")->required();
    run_cmd->add_option("--measure", run_measure, "Override the configured measure");
    run_cmd->add_option("--discretizer", run_discretizer, "Override the configured discretizer");
    auto* run_bins_opt = run_cmd->add_option("--bins", run_overrides.bins, "Override the configured bin count");
    auto* run_seed_opt = run_cmd->add_option("--seed", run_overrides.seed, "Override the configured seed");
    run_cmd->add_option("--out", run_overrides.out_json, "Override the JSON report path");
    run_cmd->add_option("--markdown", run_overrides.out_markdown, "Override the Markdown report path");

    // ---- sweep -----------------------------------------------------------
    std::string sweep_config_path, sweep_axes_csv, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "Ablation sweep over measures/discretizers/bin counts");
    sweep_cmd->add_option("--config", sweep_config_path, "JSON configuration file")->required();
    sweep_cmd->add_option("--axes", sweep_axes_csv, "Comma list of axes: measures,discretizers,bins")
        ->required();
    sweep_cmd->add_option("--out", sweep_out, "Long-format CSV output path (variant,generated,feature,fis)");

    CLI11_PARSE(app, argc, argv);

    if (hie_cmd->parsed()) {
        apply_dataset_flags(hie_cfg, hie_ds);
        finish_config(hie_cfg, hie_discretizer, hie_bin_fit, hie_measure, hie_weights, hie_groups);
        hie_cfg.run_hie = true;
        hie_cfg.run_gfa = false;
        const auto report = mpego::report::run(hie_cfg);
        if (hie_cfg.out_json.empty()) std::cout << report.to_json() << '\n';
        return 0;
    }
    if (gfa_cmd->parsed()) {
        apply_dataset_flags(gfa_cfg, gfa_ds);
        finish_config(gfa_cfg, gfa_discretizer, gfa_bin_fit, "", "", "");
        gfa_cfg.run_hie = false;
        gfa_cfg.run_gfa = true;
        if (!gfa_direction.empty()) gfa_cfg.direction = mpego::gfa::direction_from_name(gfa_direction);
        const auto report = mpego::report::run(gfa_cfg);
        if (gfa_cfg.out_json.empty()) std::cout << report.to_json() << '\n';
        return 0;
    }
    if (run_cmd->parsed()) {
        auto cfg = mpego::report::validate_config(run_config_path);
        if (!run_measure.empty())
            cfg.measures_list = run_measure == "all"
                                    ? mpego::measures::all_measures()
                                    : std::vector{mpego::measures::measure_from_name(run_measure)};
        if (!run_discretizer.empty()) cfg.discretizer = mpego::discretize::method_from_name(run_discretizer);
        if (run_bins_opt->count() > 0) cfg.bins = run_overrides.bins;
        if (run_seed_opt->count() > 0) cfg.seed = run_overrides.seed;
        if (!run_overrides.out_json.empty()) cfg.out_json = run_overrides.out_json;
        if (!run_overrides.out_markdown.empty()) cfg.out_markdown = run_overrides.out_markdown;
        const auto report = mpego::report::run(cfg);
        if (cfg.out_json.empty()) std::cout << report.to_json() << '\n';
        return 0;
    }
    if (sweep_cmd->parsed()) {
        const auto cfg = mpego::report::validate_config(sweep_config_path);
        mpego::report::SweepAxes axes;
        std::stringstream ss(sweep_axes_csv);
        std::string axis;
        while (std::getline(ss, axis, ',')) {
            if (axis == "measures") axes.measures = true;
            else if (axis == "discretizers") axes.discretizers = true;
            else if (axis == "bins" || axis == "bin_counts") axes.bin_counts = true;
            else throw mpego::ConfigError("unknown sweep axis '" + axis + "'");
        }
        const auto sweep = mpego::report::ablation_sweep(cfg, axes);
        if (sweep_out.empty()) {
            std::cout << sweep.long_table_csv();
        } else {
            std::ofstream out(sweep_out);
            if (!out) throw mpego::Error("cannot write file: " + sweep_out);
            out << sweep.long_table_csv();
        }
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const mpego::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
