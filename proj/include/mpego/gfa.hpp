#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpego/dataset.hpp"
#include "mpego/discretize.hpp"

namespace mpego::gfa {

enum class Direction { over, under };

const char* direction_name(Direction d);
Direction direction_from_name(const std::string& name);

/// Multiplicative odds-shift clamps; a pure subset's supremum over q is never
/// attained, so the score is evaluated at these finite bounds.
inline constexpr double kQMax = 1e6;
inline constexpr double kQMin = 1e-6;

/// Conjunction across features of stratum unions within a feature. An empty
/// stratum set leaves the feature unconstrained.
struct SubsetDescriptor {
    std::vector<std::vector<std::int32_t>> selected;  // per feature, sorted stratum indices

    bool constrains(std::size_t feature) const { return !selected[feature].empty(); }
    bool any_constraint() const;
    bool operator==(const SubsetDescriptor&) const = default;

    /// e.g. "LogP >=1.31 AND Weight <258.1".
    std::string render(const discretize::DiscretizedTable& disc) const;
};

struct ScanParams {
    std::size_t min_subset_size = 1;
    std::size_t max_sweeps = 100;
    int threads = 0;
};

struct ScanResult {
    SubsetDescriptor subset;
    std::string subset_text;
    std::int64_t group_size = 0;       // N_s
    double observed = 0.0;             // fraction of generated samples in S
    double q = 1.0;
    double score = 0.0;                // Gamma
    double odds_ratio = 1.0;
    double ci_low = 1.0;
    double ci_high = 1.0;
    std::optional<double> p_value;
    double elapsed_seconds = 0.0;
    Direction direction = Direction::over;
    double expected = 0.0;             // e_g of the scanned pool

    std::string to_json() const;
    std::string to_markdown(const std::string& model, const std::string& baseline) const;
};

/// Maximum-likelihood odds multiplier for a subset with n_s rows of which
/// sum_y are generated, clamped to the direction's admissible range.
double mle_q(std::int64_t n_s, std::int64_t sum_y, double e_g, Direction direction);

/// Bernoulli likelihood-ratio score at the clamped MLE:
///   Gamma = log(q) * sum_y - n_s * log(1 - e_g + q * e_g)
std::pair<double, double> bernoulli_score(std::int64_t n_s, std::int64_t sum_y, double e_g,
                                          Direction direction);

/// Coordinate-ascent subset scan with LTSS prefix search per feature and
/// multiple random restarts. Deterministic for a fixed seed regardless of
/// thread count.
ScanResult scan(const dataset::LabeledPool& pool, const discretize::BinningSpec& bins,
                Direction direction, std::size_t restarts, std::uint64_t seed,
                const ScanParams& params = {});

/// Odds ratio of generated membership between S and its complement, with the
/// Woolf 95% interval; 0.5 added to every cell when any cell is zero.
struct OddsRatioCi {
    double odds_ratio = 1.0;
    double low = 1.0;
    double high = 1.0;
};
OddsRatioCi subset_odds_ratio(const dataset::LabeledPool& pool, const discretize::DiscretizedTable& disc,
                              const SubsetDescriptor& subset);

/// Permutation p-value: labels are shuffled, the pool rescanned, and
/// p = (1 + #{null >= observed}) / (1 + permutations).
double empirical_p(const dataset::LabeledPool& pool, double observed_score,
                   const discretize::BinningSpec& bins, Direction direction,
                   std::size_t permutations, std::size_t restarts, std::uint64_t seed,
                   const ScanParams& params = {});

// --- internals exposed for testing ---------------------------------------

/// Row-major discretized view used by the scanner.
struct ScanData {
    std::vector<std::vector<std::int32_t>> strata;  // per feature, per row
    std::vector<std::int32_t> strata_count;         // per feature
    std::vector<std::uint8_t> labels;
    double e_g = 0.0;
};
ScanData make_scan_data(const dataset::LabeledPool& pool, const discretize::BinningSpec& bins);

/// Subset membership + score of a descriptor over explicit data (the slow,
/// obvious evaluation; the scanner must agree with it).
std::pair<std::int64_t, std::int64_t> subset_counts(const ScanData& data, const SubsetDescriptor& subset);

/// One seeded restart of the coordinate ascent (serial).
struct RestartOutcome {
    SubsetDescriptor subset;
    double score = 0.0;
    double q = 1.0;
    std::int64_t n_s = 0;
    std::int64_t sum_y = 0;
};
RestartOutcome scan_restart(const ScanData& data, Direction direction, std::uint64_t seed,
                            const ScanParams& params);

}  // namespace mpego::gfa
