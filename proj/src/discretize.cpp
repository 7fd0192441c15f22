#include "mpego/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

namespace mpego::discretize {

using dataset::FeatureKind;

const char* method_name(Method m) {
    switch (m) {
        case Method::equal_width: return "equal-width";
        case Method::equal_frequency: return "equal-frequency";
        case Method::kmeans: return "kmeans";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "equal-width") return Method::equal_width;
    if (name == "equal-frequency") return Method::equal_frequency;
    if (name == "kmeans") return Method::kmeans;
    throw ConfigError("unknown discretizer '" + name + "' (expected equal-width|equal-frequency|kmeans)");
}

std::string FeatureBinning::stratum_label(std::size_t u) const {
    if (identity) return categories.at(u);
    if (u == 0) return "<" + fmt_double(cuts.front());
    if (u == cuts.size()) return "≥" + fmt_double(cuts.back());
    return "[" + fmt_double(cuts[u - 1]) + " , " + fmt_double(cuts[u]) + ")";
}

int BinningSpec::index_of(const std::string& feature) const {
    for (std::size_t i = 0; i < features.size(); ++i)
        if (features[i] == feature) return static_cast<int>(i);
    return -1;
}

std::string BinningSpec::to_json() const {
    nlohmann::ordered_json doc;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& b = per_feature[i];
        if (b.identity)
            doc[features[i]] = nlohmann::json{{"categories", b.categories}};
        else
            doc[features[i]] = b.cuts;
    }
    return doc.dump(2);
}

BinningSpec BinningSpec::from_json(const std::string& text) {
    const auto doc = nlohmann::ordered_json::parse(text);
    if (!doc.is_object()) throw Error("binning spec must be a JSON object");
    BinningSpec spec;
    for (const auto& [name, value] : doc.items()) {
        FeatureBinning b;
        if (value.is_array()) {
            b.cuts = value.get<std::vector<double>>();
            bool ok = !b.cuts.empty();
            for (std::size_t i = 1; ok && i < b.cuts.size(); ++i) ok = b.cuts[i - 1] < b.cuts[i];
            if (!ok) throw Error("binning spec: cuts for '" + name + "' must be non-empty and strictly increasing");
        } else if (value.is_object() && value.contains("categories")) {
            b.identity = true;
            b.categories = value.at("categories").get<std::vector<std::string>>();
        } else {
            throw Error("binning spec: bad entry for '" + name + "'");
        }
        spec.features.push_back(name);
        spec.per_feature.push_back(std::move(b));
    }
    return spec;
}

std::vector<double> equal_width(std::span<const double> values, std::size_t k) {
    if (k < 2) throw Error("equal_width: k must be >= 2");
    if (values.empty()) throw Error("equal_width: empty input");
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *mn_it, hi = *mx_it;
    if (lo == hi) throw Error("equal_width: degenerate range (all values identical)");
    std::vector<double> cuts;
    cuts.reserve(k - 1);
    for (std::size_t i = 1; i < k; ++i) {
        const double c = lo + static_cast<double>(i) * (hi - lo) / static_cast<double>(k);
        if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
    }
    return cuts;
}

std::vector<double> equal_frequency(std::span<const double> values, std::size_t k) {
    if (k < 2) throw Error("equal_frequency: k must be >= 2");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    // Achievable split positions: p such that sorted[p-1] < sorted[p]. Cutting
    // at sorted[p] puts exactly p values into the strata below (half-open
    // convention), so the split realizes a left-count of p.
    std::vector<std::size_t> boundaries;
    for (std::size_t p = 1; p < n; ++p)
        if (sorted[p - 1] < sorted[p]) boundaries.push_back(p);
    if (boundaries.empty()) throw Error("equal_frequency: fewer than 2 distinct values");
    std::vector<double> cuts;
    for (std::size_t i = 1; i < k; ++i) {
        const double target = static_cast<double>(i) * static_cast<double>(n) / static_cast<double>(k);
        std::size_t best = boundaries[0];
        for (const std::size_t p : boundaries)
            if (std::abs(static_cast<double>(p) - target) < std::abs(static_cast<double>(best) - target)) best = p;
        const double cut = sorted[best];
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
    return cuts;
}

namespace {

double assign_cost(const std::vector<double>& sorted, const std::vector<double>& centers,
                   std::vector<std::int32_t>& assign) {
    // Centers are kept sorted, so assignment boundaries are midpoints.
    std::vector<double> mids(centers.size() - 1);
    for (std::size_t i = 0; i + 1 < centers.size(); ++i) mids[i] = 0.5 * (centers[i] + centers[i + 1]);
    double cost = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto it = std::upper_bound(mids.begin(), mids.end(), sorted[i]);
        const auto c = static_cast<std::int32_t>(it - mids.begin());
        assign[i] = c;
        const double d = sorted[i] - centers[static_cast<std::size_t>(c)];
        cost += d * d;
    }
    return cost;
}

}  // namespace

KMeansTrace kmeans_1d_trace(std::span<const double> values, std::size_t k,
                            std::uint64_t seed, std::size_t max_iters) {
    if (k < 2) throw Error("kmeans_1d: k must be >= 2");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct(sorted);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < k)
        throw Error("kmeans_1d: " + std::to_string(distinct.size()) + " distinct values < k=" + std::to_string(k));

    rng::Engine eng(seed);
    // k-means++ style seeding over the distinct values.
    std::vector<double> centers;
    centers.push_back(distinct[static_cast<std::size_t>(eng.below(distinct.size()))]);
    std::vector<double> d2(distinct.size());
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const double c : centers) best = std::min(best, (distinct[i] - c) * (distinct[i] - c));
            d2[i] = best;
            total += best;
        }
        // total > 0: there are >= k distinct values, so some point is no
        // center yet and carries positive distance.
        const double target = eng.unit() * total;
        std::size_t pick = distinct.size();
        std::size_t last_positive = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            if (d2[i] > 0.0) last_positive = i;
            acc += d2[i];
            if (d2[i] > 0.0 && acc >= target) {
                pick = i;
                break;
            }
        }
        if (pick == distinct.size()) pick = last_positive;  // fp drift guard
        centers.push_back(distinct[pick]);
    }
    std::sort(centers.begin(), centers.end());

    KMeansTrace trace;
    std::vector<std::int32_t> assign(sorted.size());
    std::vector<std::int32_t> prev_assign;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const double cost = assign_cost(sorted, centers, assign);
        trace.iteration_costs.push_back(cost);
        if (assign == prev_assign) break;
        prev_assign = assign;
        std::vector<double> sum(k, 0.0);
        std::vector<std::size_t> cnt(k, 0);
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            sum[static_cast<std::size_t>(assign[i])] += sorted[i];
            ++cnt[static_cast<std::size_t>(assign[i])];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (cnt[c] > 0) centers[c] = sum[c] / static_cast<double>(cnt[c]);
        // An emptied cluster grabs the point farthest from its center.
        for (std::size_t c = 0; c < k; ++c) {
            if (cnt[c] > 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < sorted.size(); ++i) {
                const double d = std::abs(sorted[i] - centers[static_cast<std::size_t>(assign[i])]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers[c] = sorted[far];
        }
        std::sort(centers.begin(), centers.end());
    }

    for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
        const double mid = 0.5 * (centers[i] + centers[i + 1]);
        if (trace.cuts.empty() || mid > trace.cuts.back()) trace.cuts.push_back(mid);
    }
    if (trace.cuts.empty()) throw Error("kmeans_1d: centroids collapsed to a single point");
    return trace;
}

std::vector<double> kmeans_1d(std::span<const double> values, std::size_t k,
                              std::uint64_t seed, std::size_t max_iters) {
    return kmeans_1d_trace(values, k, seed, max_iters).cuts;
}

BinningSpec fit_bins(const dataset::LabeledPool& pool, const FitOptions& opts) {
    const auto& table = pool.table;
    const auto& schema = table.schema();
    BinningSpec spec;
    spec.features = schema.names;
    spec.per_feature.resize(schema.size());

    const int threads = resolve_threads(opts.threads);
    std::vector<std::string> errors(schema.size());
    auto fit_one = [&](std::size_t c) {
        try {
            FeatureBinning b;
            if (schema.kinds[c] != FeatureKind::continuous) {
                b.identity = true;
                b.categories = table.dictionary(c);
                std::sort(b.categories.begin(), b.categories.end());
            } else {
                std::vector<double> vals;
                const auto all = table.reals(c);
                if (opts.population == FitPopulation::pooled) {
                    vals.assign(all.begin(), all.end());
                } else {
                    for (std::size_t r = 0; r < table.rows(); ++r)
                        if (pool.labels[r] == 0) vals.push_back(all[r]);
                }
                switch (opts.method) {
                    case Method::equal_width: b.cuts = equal_width(vals, opts.bins); break;
                    case Method::equal_frequency: b.cuts = equal_frequency(vals, opts.bins); break;
                    case Method::kmeans:
                        b.cuts = kmeans_1d(vals, opts.bins, rng::derive_seed(opts.seed, c));
                        break;
                }
            }
            spec.per_feature[c] = std::move(b);
        } catch (const std::exception& e) {
            errors[c] = std::string("feature '") + schema.names[c] + "': " + e.what();
        }
    };

    if (threads <= 1) {
        for (std::size_t c = 0; c < schema.size(); ++c) fit_one(c);
    } else {
#pragma omp parallel for num_threads(threads) schedule(dynamic)
        for (long long c = 0; c < static_cast<long long>(schema.size()); ++c)
            fit_one(static_cast<std::size_t>(c));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error("fit_bins: " + e);
    return spec;
}

std::int32_t stratum_of(double value, const std::vector<double>& cuts) {
    // Number of cuts <= value; a value equal to a cut lands in the interval
    // to the right of it.
    const auto it = std::upper_bound(cuts.begin(), cuts.end(), value);
    return static_cast<std::int32_t>(it - cuts.begin());
}

DiscretizedTable apply_bins(const dataset::FeatureTable& table, const BinningSpec& spec) {
    const auto& schema = table.schema();
    DiscretizedTable out;
    out.features = schema.names;
    out.rows = table.rows();
    out.strata_count.resize(schema.size());
    out.labels.resize(schema.size());
    out.cuts.resize(schema.size());
    out.strata.resize(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
        const int si = spec.index_of(schema.names[c]);
        if (si < 0) throw Error("apply_bins: feature '" + schema.names[c] + "' absent from binning spec");
        const auto& b = spec.per_feature[static_cast<std::size_t>(si)];
        out.strata_count[c] = b.strata();
        if (!b.identity) out.cuts[c] = b.cuts;
        out.labels[c].resize(b.strata());
        for (std::size_t u = 0; u < b.strata(); ++u) out.labels[c][u] = b.stratum_label(u);
        auto& col = out.strata[c];
        col.resize(table.rows());
        if (b.identity) {
            if (schema.kinds[c] == FeatureKind::continuous)
                throw Error("apply_bins: identity binning given for continuous feature '" + schema.names[c] + "'");
            // Map table codes through the spec's sorted category order.
            const auto& dict = table.dictionary(c);
            std::vector<std::int32_t> remap(dict.size());
            for (std::size_t t = 0; t < dict.size(); ++t) {
                const auto it = std::lower_bound(b.categories.begin(), b.categories.end(), dict[t]);
                if (it == b.categories.end() || *it != dict[t])
                    throw Error("apply_bins: category '" + dict[t] + "' of feature '" + schema.names[c] +
                                "' was not present when bins were fit");
                remap[t] = static_cast<std::int32_t>(it - b.categories.begin());
            }
            for (std::size_t r = 0; r < table.rows(); ++r)
                col[r] = remap[static_cast<std::size_t>(table.code_at(r, c))];
        } else {
            if (schema.kinds[c] != FeatureKind::continuous)
                throw Error("apply_bins: cut points given for non-continuous feature '" + schema.names[c] + "'");
            const auto vals = table.reals(c);
            for (std::size_t r = 0; r < table.rows(); ++r) col[r] = stratum_of(vals[r], b.cuts);
        }
    }
    return out;
}

}  // namespace mpego::discretize
