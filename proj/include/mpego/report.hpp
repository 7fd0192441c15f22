#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpego/gfa.hpp"
#include "mpego/hie.hpp"

namespace mpego::report {

/// Fully resolved run configuration; defaults match the engine-wide defaults
/// (equal-frequency, 5 bins, yules-y, uniform weights, 10 restarts).
struct EvaluationConfig {
    std::vector<std::string> generated;       // one or more generated tables
    std::string reference;                    // training/reference table
    std::optional<std::string> generated_baseline;  // head-to-head baseline
    std::optional<std::string> schema_path;
    char delimiter = ',';
    bool drop_incomplete = false;

    std::optional<std::size_t> subsample;
    std::uint64_t seed = 0;

    discretize::Method discretizer = discretize::Method::equal_frequency;
    std::size_t bins = 5;
    discretize::FitPopulation bin_fit = discretize::FitPopulation::pooled;

    std::vector<measures::MeasureKind> measures_list{measures::MeasureKind::yules_y};
    hie::WeightScheme weights = hie::WeightScheme::uniform;
    std::vector<hie::GroupSpec> groups;

    bool run_hie = true;
    bool run_gfa = false;
    gfa::Direction direction = gfa::Direction::over;
    std::size_t restarts = 10;
    std::size_t permutations = 99;
    std::size_t min_subset_size = 1;
    bool balance = false;  // subsample the larger population down to the smaller

    std::string out_json;
    std::string out_markdown;
    std::string out_histograms;
    int threads = 0;
};

struct HistogramData {
    std::string feature;
    std::vector<double> edges;               // bin_count + 1 shared edges
    std::vector<double> density_generated;   // sums to 1 when scaled by width
    std::vector<double> density_reference;
};

struct ComparisonReport {
    std::string generated;
    std::string baseline;
    discretize::BinningSpec binning;  // bins used by gfa/histograms
    std::vector<hie::HieReport> hie;  // one per configured measure
    std::optional<gfa::ScanResult> gfa;
    std::vector<HistogramData> histograms;
};

struct RunReport {
    EvaluationConfig config;
    std::vector<ComparisonReport> comparisons;
    std::string version = kVersion;
    std::string generated_at;  // wall-clock; excluded from determinism checks

    std::string to_json() const;
    std::string to_markdown() const;
};

/// Parse + validate a JSON config file. Validation problems are aggregated
/// into a single ConfigError rather than reported one at a time.
EvaluationConfig validate_config(const std::string& path);

/// Validate an in-memory config (same aggregation semantics).
void validate(const EvaluationConfig& config);

/// Execute the configured analyses and write any requested outputs.
RunReport run(const EvaluationConfig& config);

struct SweepAxes {
    bool measures = false;
    bool discretizers = false;
    bool bin_counts = false;
    std::vector<measures::MeasureKind> measure_list;     // default: all
    std::vector<discretize::Method> discretizer_list;    // default: all three
    std::vector<std::size_t> bin_list;                   // default: {3, 5, 10}
};

struct SweepCell {
    std::string variant;
    std::string generated;
    std::string feature;
    double fis = 0.0;
    bool skipped = false;
};

struct SweepReport {
    std::vector<RunReport> runs;
    std::vector<SweepCell> long_table;

    std::string long_table_csv() const;
};

/// Cartesian product over the requested axes; HIE only.
SweepReport ablation_sweep(const EvaluationConfig& config, const SweepAxes& axes);

std::vector<HistogramData> emit_histograms(const dataset::FeatureTable& gen,
                                           const dataset::FeatureTable& ref,
                                           const discretize::BinningSpec& bins,
                                           std::size_t bin_count = 50);

void write_histograms_csv(const std::vector<HistogramData>& histograms, const std::string& path);

}  // namespace mpego::report
