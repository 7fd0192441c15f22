#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpego/dataset.hpp"

namespace mpego::discretize {

enum class Method { equal_width, equal_frequency, kmeans };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

enum class FitPopulation { pooled, reference };

/// Binning of one feature: ordered cut points for continuous features
/// (k cuts define k+1 half-open strata (-inf,c1), [c1,c2), ..., [ck,+inf)),
/// or the sorted distinct categories for binary/categorical features.
struct FeatureBinning {
    bool identity = false;
    std::vector<double> cuts;             // strictly increasing; continuous only
    std::vector<std::string> categories;  // identity only

    std::size_t strata() const { return identity ? categories.size() : cuts.size() + 1; }
    std::string stratum_label(std::size_t u) const;
};

struct BinningSpec {
    std::vector<std::string> features;
    std::vector<FeatureBinning> per_feature;

    int index_of(const std::string& feature) const;
    std::string to_json() const;
    static BinningSpec from_json(const std::string& text);
};

/// Per-row stratum indices per feature, plus rendered stratum labels.
struct DiscretizedTable {
    std::vector<std::string> features;
    std::vector<std::size_t> strata_count;              // C_m per feature
    std::vector<std::vector<std::string>> labels;       // per feature, per stratum
    std::vector<std::vector<double>> cuts;              // per feature; empty for identity
    std::vector<std::vector<std::int32_t>> strata;      // per feature, per row
    std::size_t rows = 0;
};

/// Cuts at min + i*(max-min)/k.
std::vector<double> equal_width(std::span<const double> values, std::size_t k);

/// Cuts at the i/k empirical boundaries of the sorted sample; boundaries
/// falling inside a run of equal values snap to the nearest achievable split
/// and duplicates collapse, so the effective bin count may drop below k.
std::vector<double> equal_frequency(std::span<const double> values, std::size_t k);

/// Lloyd's algorithm on the 1-D sample, k-means++ style seeding; cuts at
/// midpoints between consecutive sorted centroids.
std::vector<double> kmeans_1d(std::span<const double> values, std::size_t k,
                              std::uint64_t seed, std::size_t max_iters = 100);

/// kmeans_1d plus the within-cluster cost after every Lloyd iteration.
struct KMeansTrace {
    std::vector<double> cuts;
    std::vector<double> iteration_costs;
};
KMeansTrace kmeans_1d_trace(std::span<const double> values, std::size_t k,
                            std::uint64_t seed, std::size_t max_iters = 100);

struct FitOptions {
    Method method = Method::equal_frequency;
    std::size_t bins = 5;
    FitPopulation population = FitPopulation::pooled;
    std::uint64_t seed = 0;  // used by the kmeans discretizer
    int threads = 0;
};

BinningSpec fit_bins(const dataset::LabeledPool& pool, const FitOptions& opts);

DiscretizedTable apply_bins(const dataset::FeatureTable& table, const BinningSpec& spec);

/// Stratum of a single continuous value under the half-open convention.
std::int32_t stratum_of(double value, const std::vector<double>& cuts);

}  // namespace mpego::discretize
