// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mpego/gfa.hpp"

namespace oracles {

/// Mutual information of a 2x2 table via the three-entropy identity
/// I(X;Y) = H(X) + H(Y) - H(X,Y), in nats.
inline double mi_entropy_route(double a, double b, double d, double g) {
    const double n = a + b + d + g;
    auto h = [](std::span<const double> ps) {
        double out = 0.0;
        for (const double p : ps)
            if (p > 0.0) out -= p * std::log(p);
        return out;
    };
    const std::vector<double> joint = {a / n, b / n, d / n, g / n};
    const std::vector<double> pop = {(a + b) / n, (d + g) / n};
    const std::vector<double> strat = {(a + d) / n, (b + g) / n};
    return h(pop) + h(strat) - h(joint);
}

/// 1-Wasserstein distance via the quantile-function route:
/// W1 = integral over u in [0,1] of |Qa(u) - Qb(u)|.
inline double wasserstein_quantile_route(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t na = a.size(), nb = b.size();
    double dist = 0.0;
    double u = 0.0;
    std::size_t i = 0, j = 0;
    while (i < na && j < nb) {
        const double ua = static_cast<double>(i + 1) / static_cast<double>(na);
        const double ub = static_cast<double>(j + 1) / static_cast<double>(nb);
        const double next = std::min(ua, ub);
        dist += (next - u) * std::abs(a[i] - b[j]);
        u = next;
        if (ua <= next) ++i;
        if (ub <= next) ++j;
    }
    return dist;
}

/// Exhaustive 1-D 2-means: best contiguous split of the sorted values.
inline double best_two_means_cut(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    double best_cost = std::numeric_limits<double>::infinity();
    double best_cut = 0.0;
    for (std::size_t split = 1; split < n; ++split) {
        auto cost_of = [&](std::size_t lo, std::size_t hi) {
            double mean = 0.0;
            for (std::size_t i = lo; i < hi; ++i) mean += values[i];
            mean /= static_cast<double>(hi - lo);
            double cost = 0.0;
            for (std::size_t i = lo; i < hi; ++i) cost += (values[i] - mean) * (values[i] - mean);
            return std::pair{cost, mean};
        };
        const auto [c1, m1] = cost_of(0, split);
        const auto [c2, m2] = cost_of(split, n);
        if (c1 + c2 < best_cost) {
            best_cost = c1 + c2;
            best_cut = 0.5 * (m1 + m2);
        }
    }
    return best_cut;
}

/// Best Bernoulli LR score over a log-uniform q grid (direction-constrained).
inline double grid_best_score(std::int64_t n_s, std::int64_t sum_y, double e_g,
                              mpego::gfa::Direction dir, std::size_t points) {
    const double lo = dir == mpego::gfa::Direction::over ? 1.0 : mpego::gfa::kQMin;
    const double hi = dir == mpego::gfa::Direction::over ? mpego::gfa::kQMax : 1.0;
    const double llo = std::log(lo), lhi = std::log(hi);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points; ++i) {
        const double q = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                                            static_cast<double>(points - 1));
        const double s = std::log(q) * static_cast<double>(sum_y) -
                         static_cast<double>(n_s) * std::log(1.0 - e_g + q * e_g);
        best = std::max(best, s);
    }
    return std::max(best, 0.0);
}

/// Exhaustive search over every conjunctive constraint pattern: per feature
/// all non-empty proper stratum subsets plus "unconstrained", excluding the
/// fully unconstrained combination. Returns the best score.
inline double exhaustive_scan_best(const mpego::gfa::ScanData& data, mpego::gfa::Direction dir,
                                   std::size_t min_size) {
    const std::size_t m = data.strata.size();
    std::vector<std::vector<std::vector<std::int32_t>>> options(m);
    for (std::size_t f = 0; f < m; ++f) {
        const auto c = static_cast<std::size_t>(data.strata_count[f]);
        options[f].push_back({});  // unconstrained
        if (c < 2) continue;
        for (std::uint32_t bits = 1; bits + 1 < (1u << c); ++bits) {
            std::vector<std::int32_t> sel;
            for (std::size_t u = 0; u < c; ++u)
                if (bits & (1u << u)) sel.push_back(static_cast<std::int32_t>(u));
            options[f].push_back(std::move(sel));
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(m, 0);
    while (true) {
        bool all_unconstrained = true;
        for (std::size_t f = 0; f < m; ++f) all_unconstrained &= pick[f] == 0;
        if (!all_unconstrained) {
            mpego::gfa::SubsetDescriptor desc;
            desc.selected.resize(m);
            for (std::size_t f = 0; f < m; ++f) desc.selected[f] = options[f][pick[f]];
            const auto [n_s, sum_y] = mpego::gfa::subset_counts(data, desc);
            if (n_s >= static_cast<std::int64_t>(min_size) && n_s > 0) {
                const double s = mpego::gfa::bernoulli_score(n_s, sum_y, data.e_g, dir).first;
                best = std::max(best, s);
            }
        }
        std::size_t f = 0;
        while (f < m && ++pick[f] == options[f].size()) pick[f++] = 0;
        if (f == m) break;
    }
    return best;
}

/// Best score over all 2^C - 1 non-empty stratum subsets of a single feature
/// (the LTSS enumeration side).
inline double single_feature_enumeration_best(const std::vector<std::int64_t>& bucket_n,
                                              const std::vector<std::int64_t>& bucket_y, double e_g,
                                              mpego::gfa::Direction dir) {
    const std::size_t c = bucket_n.size();
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint32_t bits = 1; bits < (1u << c); ++bits) {
        std::int64_t n = 0, y = 0;
        for (std::size_t u = 0; u < c; ++u) {
            if (bits & (1u << u)) {
                n += bucket_n[u];
                y += bucket_y[u];
            }
        }
        if (n == 0) continue;
        best = std::max(best, mpego::gfa::bernoulli_score(n, y, e_g, dir).first);
    }
    return best;
}

/// Best prefix score under the LTSS priority ordering (generated fraction,
/// direction-appropriate), every prefix length included.
inline double single_feature_prefix_best(const std::vector<std::int64_t>& bucket_n,
                                         const std::vector<std::int64_t>& bucket_y, double e_g,
                                         mpego::gfa::Direction dir) {
    std::vector<std::size_t> order;
    for (std::size_t u = 0; u < bucket_n.size(); ++u)
        if (bucket_n[u] > 0) order.push_back(u);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = static_cast<double>(bucket_y[a]) / static_cast<double>(bucket_n[a]);
        const double fb = static_cast<double>(bucket_y[b]) / static_cast<double>(bucket_n[b]);
        if (fa != fb) return dir == mpego::gfa::Direction::over ? fa > fb : fa < fb;
        return a < b;
    });
    double best = -std::numeric_limits<double>::infinity();
    std::int64_t n = 0, y = 0;
    for (const std::size_t u : order) {
        n += bucket_n[u];
        y += bucket_y[u];
        best = std::max(best, mpego::gfa::bernoulli_score(n, y, e_g, dir).first);
    }
    return best;
}

}  // namespace oracles
