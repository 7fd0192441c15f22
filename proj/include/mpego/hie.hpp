#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mpego/dataset.hpp"
#include "mpego/discretize.hpp"
#include "mpego/measures.hpp"

namespace mpego::hie {

enum class WeightScheme { uniform, support_weighted, custom };

const char* weight_scheme_name(WeightScheme s);
WeightScheme weight_scheme_from_name(const std::string& name);

/// Non-negative weights summing to one; used for SIS->FIS (lambda) and
/// FIS->SAFIS/GAFIS (eta) aggregation.
struct AggregationWeights {
    std::vector<double> weights;
    WeightScheme scheme = WeightScheme::uniform;

    static AggregationWeights uniform(std::size_t n);
    static AggregationWeights support(const std::vector<std::int64_t>& counts);
    static AggregationWeights custom(std::vector<double> w);
};

struct SisEntry {
    std::int32_t stratum = 0;
    std::string label;
    double score = 0.0;
    std::int64_t support = 0;  // pooled rows in the stratum (alpha + delta)
};

struct FeatureReport {
    std::string name;
    bool direct = false;   // scored on the raw distribution, no SIS level
    bool skipped = false;  // not scorable under the configured measure
    std::vector<SisEntry> sis;
    std::vector<std::int32_t> empty_strata;  // empty in both populations
    double fis = 0.0;
};

struct GroupSpec {
    std::string name;
    std::vector<std::string> members;
};

struct GroupReport {
    std::string name;
    std::vector<std::string> members;
    double score = 0.0;
};

struct HieConfig {
    measures::MeasureKind measure = measures::MeasureKind::yules_y;
    discretize::Method method = discretize::Method::equal_frequency;
    std::size_t bins = 5;
    discretize::FitPopulation bin_fit = discretize::FitPopulation::pooled;
    WeightScheme weights = WeightScheme::uniform;
    std::vector<GroupSpec> groups;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct HieReport {
    std::string gen_source;
    std::string baseline_source;
    HieConfig config;
    discretize::BinningSpec binning;
    std::vector<FeatureReport> features;
    std::vector<GroupReport> safis;
    double gafis = 0.0;

    std::string to_json() const;      // machine-readable report body
    std::string to_markdown() const;  // FIS/SAFIS/GAFIS table plus SIS detail
};

/// Per-stratum independence scores of one feature. Strata empty in both
/// populations are skipped and recorded in `empty_strata`; a stratum holding
/// both populations entirely scores 1.0 (the feature carries no information).
std::vector<SisEntry> sis(const discretize::DiscretizedTable& gen, const discretize::DiscretizedTable& ref,
                          const std::string& feature, measures::MeasureKind measure, double e_g,
                          std::vector<std::int32_t>* empty_strata = nullptr);

double fis(const std::vector<double>& sis_scores, const AggregationWeights& weights);

/// Distribution-level FIS (wasserstein / ks) computed on the raw values.
double fis_direct(std::span<const double> gen_values, std::span<const double> ref_values,
                  measures::MeasureKind measure);

double safis(const std::map<std::string, double>& fis_by_feature, const std::vector<std::string>& selection,
             const AggregationWeights& weights);

double gafis(const std::map<std::string, double>& fis_by_feature, const AggregationWeights& weights);

HieReport run_hie(const dataset::FeatureTable& gen, const dataset::FeatureTable& baseline,
                  const HieConfig& config);

}  // namespace mpego::hie
