#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mpego/common.hpp"

namespace mpego::measures {

/// 2x2 contingency cells of one feature stratum:
///   alpha  generated rows inside the stratum    beta   generated rows outside
///   delta  reference rows inside the stratum    gamma  reference rows outside
struct PivotCounts {
    std::int64_t alpha = 0;
    std::int64_t beta = 0;
    std::int64_t delta = 0;
    std::int64_t gamma = 0;

    std::int64_t total() const { return alpha + beta + delta + gamma; }
};

enum class MeasureKind {
    yules_y,
    yules_q,
    odds_ratio,
    mutual_information,
    gini,
    wasserstein,
    ks,
};

const char* measure_name(MeasureKind m);
MeasureKind measure_from_name(const std::string& name);
std::vector<MeasureKind> all_measures();

/// Pivot-table measures consume PivotCounts; the rest consume the raw value
/// distributions of a continuous feature.
bool consumes_pivot(MeasureKind m);

/// Human-readable description of the [0,1] normalization applied to a
/// measure; echoed into report metadata.
std::string normalization_map(MeasureKind m);

struct IndependenceScore {
    double value = 0.0;  // in [0,1]; 1 = no association
    MeasureKind measure = MeasureKind::yules_y;
};

PivotCounts pivot(std::span<const std::int32_t> gen_strata, std::span<const std::int32_t> ref_strata,
                  std::int32_t u, std::int32_t strata_count);

double yules_y(const PivotCounts& c);
double yules_q(const PivotCounts& c);
double odds_ratio_measure(const PivotCounts& c);
double mutual_information_2x2(const PivotCounts& c);  // nats

/// Gini gain of the stratum indicator for predicting population membership:
///   gain = gini(pool) - sum_child (n_child/n) * gini(child)
/// with gini(p) = 1 - p^2 - (1-p)^2 over the generated/reference split.
double gini_measure(const PivotCounts& c);

double wasserstein_1d(std::span<const double> gen_values, std::span<const double> ref_values);
double ks_statistic(std::span<const double> gen_values, std::span<const double> ref_values);

/// Extra inputs needed by some normalizations.
struct NormalizationContext {
    std::optional<double> pooled_range;  // wasserstein
    std::optional<double> e_g;           // gini
};

IndependenceScore to_independence(double raw, MeasureKind kind, const NormalizationContext& ctx = {});

}  // namespace mpego::measures
