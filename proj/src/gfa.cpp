#include "mpego/gfa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace mpego::gfa {

const char* direction_name(Direction d) { return d == Direction::over ? "over" : "under"; }

Direction direction_from_name(const std::string& name) {
    if (name == "over") return Direction::over;
    if (name == "under") return Direction::under;
    throw ConfigError("unknown direction '" + name + "' (expected over|under)");
}

bool SubsetDescriptor::any_constraint() const {
    return std::any_of(selected.begin(), selected.end(),
                       [](const std::vector<std::int32_t>& s) { return !s.empty(); });
}

std::string SubsetDescriptor::render(const discretize::DiscretizedTable& disc) const {
    std::ostringstream out;
    bool first_feature = true;
    for (std::size_t f = 0; f < selected.size(); ++f) {
        if (selected[f].empty()) continue;
        if (!first_feature) out << " AND ";
        first_feature = false;
        const auto& name = disc.features[f];
        const auto& labels = disc.labels[f];
        const auto& cuts = disc.cuts[f];
        if (cuts.empty()) {
            // Identity feature: list the selected categories.
            for (std::size_t i = 0; i < selected[f].size(); ++i)
                out << (i ? " OR " : "") << name << " = "
                    << labels[static_cast<std::size_t>(selected[f][i])];
            continue;
        }
        // Interval feature: merge contiguous strata into single ranges.
        std::vector<std::pair<std::int32_t, std::int32_t>> runs;
        for (const std::int32_t u : selected[f]) {
            if (!runs.empty() && runs.back().second + 1 == u)
                runs.back().second = u;
            else
                runs.emplace_back(u, u);
        }
        const auto last = static_cast<std::int32_t>(labels.size()) - 1;
        bool first_run = true;
        for (const auto& [lo, hi] : runs) {
            if (!first_run) out << " OR ";
            first_run = false;
            if (lo == hi) {
                out << name << " " << labels[static_cast<std::size_t>(lo)];
            } else if (lo == 0) {
                out << name << " <" << fmt_double(cuts[static_cast<std::size_t>(hi)]);
            } else if (hi == last) {
                out << name << " ≥" << fmt_double(cuts[static_cast<std::size_t>(lo - 1)]);
            } else {
                out << name << " [" << fmt_double(cuts[static_cast<std::size_t>(lo - 1)]) << " , "
                    << fmt_double(cuts[static_cast<std::size_t>(hi)]) << ")";
            }
        }
    }
    return out.str();
}

double mle_q(std::int64_t n_s, std::int64_t sum_y, double e_g, Direction direction) {
    if (!(e_g > 0.0 && e_g < 1.0)) throw Error("mle_q: e_g must lie in (0,1)");
    if (n_s <= 0) throw Error("mle_q: n_s must be positive");
    if (sum_y < 0 || sum_y > n_s) throw Error("mle_q: sum_y out of range");
    double qhat;
    if (sum_y == n_s)
        qhat = kQMax;
    else if (sum_y == 0)
        qhat = kQMin;
    else
        qhat = (static_cast<double>(sum_y) * (1.0 - e_g)) / (static_cast<double>(n_s - sum_y) * e_g);
    if (direction == Direction::over) return std::clamp(qhat, 1.0, kQMax);
    return std::clamp(qhat, kQMin, 1.0);
}

std::pair<double, double> bernoulli_score(std::int64_t n_s, std::int64_t sum_y, double e_g,
                                          Direction direction) {
    const double q = mle_q(n_s, sum_y, e_g, direction);
    const double score = std::log(q) * static_cast<double>(sum_y) -
                         static_cast<double>(n_s) * std::log(1.0 - e_g + q * e_g);
    return {std::max(score, 0.0), q};
}

ScanData make_scan_data(const dataset::LabeledPool& pool, const discretize::BinningSpec& bins) {
    const auto disc = discretize::apply_bins(pool.table, bins);
    ScanData data;
    data.strata = disc.strata;
    data.strata_count.reserve(disc.strata_count.size());
    for (const std::size_t c : disc.strata_count) data.strata_count.push_back(static_cast<std::int32_t>(c));
    data.labels = pool.labels;
    data.e_g = pool.e_g;
    return data;
}

std::pair<std::int64_t, std::int64_t> subset_counts(const ScanData& data, const SubsetDescriptor& subset) {
    const std::size_t n = data.labels.size();
    const std::size_t m = data.strata.size();
    std::vector<std::vector<std::uint8_t>> mask(m);
    for (std::size_t f = 0; f < m; ++f) {
        if (subset.selected[f].empty()) continue;
        mask[f].assign(static_cast<std::size_t>(data.strata_count[f]), 0);
        for (const std::int32_t u : subset.selected[f]) mask[f][static_cast<std::size_t>(u)] = 1;
    }
    std::int64_t n_s = 0, sum_y = 0;
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = true;
        for (std::size_t f = 0; f < m && ok; ++f) {
            if (mask[f].empty()) continue;
            ok = mask[f][static_cast<std::size_t>(data.strata[f][r])] != 0;
        }
        if (ok) {
            ++n_s;
            sum_y += data.labels[r];
        }
    }
    return {n_s, sum_y};
}

namespace {

double score_of(std::int64_t n_s, std::int64_t sum_y, double e_g, Direction dir) {
    if (n_s == 0) return 0.0;
    return bernoulli_score(n_s, sum_y, e_g, dir).first;
}

struct Candidate {
    bool valid = false;
    double score = 0.0;
    std::size_t size = 0;  // selected strata; unconstrained competes with C_m
    std::vector<std::int32_t> selected;
    std::int64_t n_s = 0;
    std::int64_t sum_y = 0;

    // Higher score wins; at equal score the smaller constraint wins and the
    // unconstrained option (size C_m) comes last.
    void offer(double s, std::size_t sz, std::vector<std::int32_t> sel, std::int64_t n, std::int64_t y) {
        if (valid && !(s > score || (s == score && sz < size))) return;
        valid = true;
        score = s;
        size = sz;
        selected = std::move(sel);
        n_s = n;
        sum_y = y;
    }
};

/// Priority (LTSS) ordering of occupied strata by generated fraction.
std::vector<std::int32_t> priority_order(const std::vector<std::int64_t>& bucket_n,
                                         const std::vector<std::int64_t>& bucket_y, Direction direction) {
    std::vector<std::int32_t> occupied;
    for (std::size_t u = 0; u < bucket_n.size(); ++u)
        if (bucket_n[u] > 0) occupied.push_back(static_cast<std::int32_t>(u));
    std::sort(occupied.begin(), occupied.end(), [&](std::int32_t a, std::int32_t b) {
        const double fa = static_cast<double>(bucket_y[static_cast<std::size_t>(a)]) /
                          static_cast<double>(bucket_n[static_cast<std::size_t>(a)]);
        const double fb = static_cast<double>(bucket_y[static_cast<std::size_t>(b)]) /
                          static_cast<double>(bucket_n[static_cast<std::size_t>(b)]);
        if (fa != fb) return direction == Direction::over ? fa > fb : fa < fb;
        return a < b;
    });
    return occupied;
}

/// Best LTSS prefix of one feature given per-stratum counts. Prefixes that
/// would select every stratum of the feature are excluded (not a proper
/// constraint).
Candidate best_prefix(const std::vector<std::int64_t>& bucket_n, const std::vector<std::int64_t>& bucket_y,
                      std::size_t strata_count, Direction direction, double e_g, std::size_t min_size) {
    Candidate best;
    const auto occupied = priority_order(bucket_n, bucket_y, direction);
    std::int64_t cum_n = 0, cum_y = 0;
    for (std::size_t j = 0; j < occupied.size(); ++j) {
        cum_n += bucket_n[static_cast<std::size_t>(occupied[j])];
        cum_y += bucket_y[static_cast<std::size_t>(occupied[j])];
        if (j + 1 == strata_count) break;
        if (cum_n < static_cast<std::int64_t>(min_size)) continue;
        std::vector<std::int32_t> sel(occupied.begin(), occupied.begin() + static_cast<long>(j) + 1);
        std::sort(sel.begin(), sel.end());
        best.offer(score_of(cum_n, cum_y, e_g, direction), j + 1, std::move(sel), cum_n, cum_y);
    }
    return best;
}

}  // namespace

RestartOutcome scan_restart(const ScanData& data, Direction direction, std::uint64_t seed,
                            const ScanParams& params) {
    const std::size_t n = data.labels.size();
    const std::size_t m = data.strata.size();
    if (n == 0 || m == 0) throw Error("scan: empty pool");
    rng::Engine eng(seed);

    // Random initial descriptor: each feature is unconstrained with
    // probability 1/2, otherwise a random non-empty proper stratum subset.
    SubsetDescriptor desc;
    desc.selected.resize(m);
    std::vector<std::vector<std::uint8_t>> mask(m);
    for (std::size_t f = 0; f < m; ++f) {
        const auto c = static_cast<std::size_t>(data.strata_count[f]);
        if (c < 2 || eng.below(2) == 0) continue;
        std::vector<std::uint8_t> bits(c, 0);
        bool ok = false;
        for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
            std::size_t count = 0;
            for (auto& b : bits) count += (b = static_cast<std::uint8_t>(eng.below(2)));
            ok = count > 0 && count < c;
        }
        if (!ok) {
            std::fill(bits.begin(), bits.end(), 0);
            bits[static_cast<std::size_t>(eng.below(c))] = 1;
        }
        mask[f] = bits;
        for (std::size_t u = 0; u < c; ++u)
            if (bits[u]) desc.selected[f].push_back(static_cast<std::int32_t>(u));
    }

    // fails[r] = number of constrained features whose selection excludes row r.
    std::vector<std::int32_t> fails(n, 0);
    for (std::size_t f = 0; f < m; ++f) {
        if (mask[f].empty()) continue;
        const auto& col = data.strata[f];
        for (std::size_t r = 0; r < n; ++r) fails[r] += mask[f][static_cast<std::size_t>(col[r])] == 0;
    }

    std::int64_t cur_n = 0, cur_y = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (fails[r] == 0) {
            ++cur_n;
            cur_y += data.labels[r];
        }
    }
    double cur_score = score_of(cur_n, cur_y, data.e_g, direction);

    std::vector<std::int64_t> bucket_n, bucket_y;
    std::vector<std::size_t> order(m);
    for (std::size_t f = 0; f < m; ++f) order[f] = f;

    // One coordinate-ascent step over feature f; returns true on a switch.
    auto update_feature = [&](std::size_t f) {
        const auto c = static_cast<std::size_t>(data.strata_count[f]);
        if (c < 2) return false;
        const auto& col = data.strata[f];
        const bool constrained = !mask[f].empty();

        // Rows satisfying every other feature's constraint, bucketed by this
        // feature's stratum.
        bucket_n.assign(c, 0);
        bucket_y.assign(c, 0);
        std::int64_t total_n = 0, total_y = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const std::int32_t viol = constrained && mask[f][static_cast<std::size_t>(col[r])] == 0;
            if (fails[r] != viol) continue;
            const auto u = static_cast<std::size_t>(col[r]);
            ++bucket_n[u];
            bucket_y[u] += data.labels[r];
            ++total_n;
            total_y += data.labels[r];
        }
        if (total_n == 0) return false;

        Candidate best = best_prefix(bucket_n, bucket_y, c, direction, data.e_g, params.min_subset_size);
        best.offer(score_of(total_n, total_y, data.e_g, direction), c, {}, total_n, total_y);

        const std::size_t cur_size = desc.selected[f].empty() ? c : desc.selected[f].size();
        if (!(best.score > cur_score || (best.score == cur_score && best.size < cur_size))) return false;

        // Take the switch; refresh the per-row violation counters.
        std::vector<std::uint8_t> new_mask;
        if (!best.selected.empty()) {
            new_mask.assign(c, 0);
            for (const std::int32_t u : best.selected) new_mask[static_cast<std::size_t>(u)] = 1;
        }
        for (std::size_t r = 0; r < n; ++r) {
            const std::int32_t old_viol = constrained && mask[f][static_cast<std::size_t>(col[r])] == 0;
            const std::int32_t new_viol = !new_mask.empty() && new_mask[static_cast<std::size_t>(col[r])] == 0;
            fails[r] += new_viol - old_viol;
        }
        mask[f] = std::move(new_mask);
        desc.selected[f] = best.selected;
        cur_score = best.score;
        cur_n = best.n_s;
        cur_y = best.sum_y;
        return true;
    };

    // Sweeps until a full pass makes no switch. Visiting order is resampled
    // every sweep so restarts explore different ascent paths.
    auto ascend = [&] {
        for (std::size_t sweep = 0; sweep < params.max_sweeps; ++sweep) {
            bool switched = false;
            eng.shuffle(order);
            for (const std::size_t f : order) switched |= update_feature(f);
            if (!switched) break;
        }
    };
    ascend();

    // Escape pass: a converged state can sit one pairwise move from a better
    // optimum. Drop one feature's constraint, re-ascend, and keep the result
    // only when it strictly improves; every accepted kick raises the score,
    // so this terminates.
    struct Snapshot {
        SubsetDescriptor desc;
        std::vector<std::vector<std::uint8_t>> mask;
        std::vector<std::int32_t> fails;
        std::int64_t n, y;
        double score;
    };
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t f = 0; f < m && !improved; ++f) {
            if (desc.selected[f].empty()) continue;
            Snapshot snap{desc, mask, fails, cur_n, cur_y, cur_score};
            const auto& col = data.strata[f];
            for (std::size_t r = 0; r < n; ++r)
                fails[r] -= mask[f][static_cast<std::size_t>(col[r])] == 0;
            mask[f].clear();
            desc.selected[f].clear();
            cur_n = 0;
            cur_y = 0;
            for (std::size_t r = 0; r < n; ++r) {
                if (fails[r] == 0) {
                    ++cur_n;
                    cur_y += data.labels[r];
                }
            }
            cur_score = score_of(cur_n, cur_y, data.e_g, direction);
            ascend();
            if (cur_score > snap.score) {
                improved = true;
            } else {
                desc = std::move(snap.desc);
                mask = std::move(snap.mask);
                fails = std::move(snap.fails);
                cur_n = snap.n;
                cur_y = snap.y;
                cur_score = snap.score;
            }
        }
    }

    // A result must constrain at least one feature and cover at least one
    // row; fall back to the best single-feature prefix over the whole pool.
    if (!desc.any_constraint() || cur_n == 0) {
        Candidate fallback;
        std::size_t fallback_f = m;
        for (std::size_t f = 0; f < m; ++f) {
            const auto c = static_cast<std::size_t>(data.strata_count[f]);
            if (c < 2) continue;
            const auto& col = data.strata[f];
            bucket_n.assign(c, 0);
            bucket_y.assign(c, 0);
            for (std::size_t r = 0; r < n; ++r) {
                const auto u = static_cast<std::size_t>(col[r]);
                ++bucket_n[u];
                bucket_y[u] += data.labels[r];
            }
            Candidate cand =
                best_prefix(bucket_n, bucket_y, c, direction, data.e_g, params.min_subset_size);
            if (cand.valid &&
                (!fallback.valid || cand.score > fallback.score ||
                 (cand.score == fallback.score && cand.size < fallback.size))) {
                fallback = std::move(cand);
                fallback_f = f;
            }
        }
        if (!fallback.valid) throw Error("scan: no constrained subset possible");
        desc.selected.assign(m, {});
        desc.selected[fallback_f] = fallback.selected;
        cur_score = fallback.score;
        cur_n = fallback.n_s;
        cur_y = fallback.sum_y;
    }

    RestartOutcome out;
    out.subset = std::move(desc);
    out.score = cur_score;
    out.n_s = cur_n;
    out.sum_y = cur_y;
    out.q = mle_q(cur_n, cur_y, data.e_g, direction);
    return out;
}

namespace {

RestartOutcome best_of_restarts(const ScanData& data, Direction direction, std::size_t restarts,
                                std::uint64_t seed, const ScanParams& params) {
    if (restarts == 0) throw Error("scan: restarts must be positive");
    const int threads = resolve_threads(params.threads);
    std::vector<RestartOutcome> outcomes(restarts);
    std::vector<std::string> errors(restarts);
    auto run_one = [&](std::size_t r) {
        try {
            outcomes[r] = scan_restart(data, direction, rng::derive_seed(seed, r), params);
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    };
    if (threads <= 1 || restarts == 1) {
        for (std::size_t r = 0; r < restarts; ++r) run_one(r);
    } else {
#pragma omp parallel for num_threads(threads) schedule(dynamic)
        for (long long r = 0; r < static_cast<long long>(restarts); ++r)
            run_one(static_cast<std::size_t>(r));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error(e);
    // Deterministic reduction: best score, first restart wins ties.
    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r)
        if (outcomes[r].score > outcomes[best].score) best = r;
    return outcomes[best];
}

}  // namespace

ScanResult scan(const dataset::LabeledPool& pool, const discretize::BinningSpec& bins,
                Direction direction, std::size_t restarts, std::uint64_t seed,
                const ScanParams& params) {
    if (pool.n_gen == 0 || pool.n_ref == 0)
        throw Error("scan: pool must contain both generated and reference rows");
    const auto t0 = std::chrono::steady_clock::now();
    const auto disc = discretize::apply_bins(pool.table, bins);
    ScanData data;
    data.strata = disc.strata;
    data.strata_count.reserve(disc.strata_count.size());
    for (const std::size_t c : disc.strata_count) data.strata_count.push_back(static_cast<std::int32_t>(c));
    data.labels = pool.labels;
    data.e_g = pool.e_g;

    const RestartOutcome best = best_of_restarts(data, direction, restarts, seed, params);

    ScanResult res;
    res.subset = best.subset;
    res.subset_text = best.subset.render(disc);
    res.group_size = best.n_s;
    res.observed = static_cast<double>(best.sum_y) / static_cast<double>(best.n_s);
    res.q = best.q;
    res.score = best.score;
    res.direction = direction;
    res.expected = pool.e_g;
    const auto orc = subset_odds_ratio(pool, disc, best.subset);
    res.odds_ratio = orc.odds_ratio;
    res.ci_low = orc.low;
    res.ci_high = orc.high;
    res.elapsed_seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
}

OddsRatioCi subset_odds_ratio(const dataset::LabeledPool& pool, const discretize::DiscretizedTable& disc,
                              const SubsetDescriptor& subset) {
    const std::size_t n = pool.labels.size();
    const std::size_t m = disc.features.size();
    std::vector<std::vector<std::uint8_t>> mask(m);
    for (std::size_t f = 0; f < m; ++f) {
        if (subset.selected[f].empty()) continue;
        mask[f].assign(disc.strata_count[f], 0);
        for (const std::int32_t u : subset.selected[f]) mask[f][static_cast<std::size_t>(u)] = 1;
    }
    std::int64_t y1_in = 0, y0_in = 0, y1_out = 0, y0_out = 0;
    for (std::size_t r = 0; r < n; ++r) {
        bool in = true;
        for (std::size_t f = 0; f < m && in; ++f) {
            if (mask[f].empty()) continue;
            in = mask[f][static_cast<std::size_t>(disc.strata[f][r])] != 0;
        }
        if (in)
            (pool.labels[r] ? y1_in : y0_in) += 1;
        else
            (pool.labels[r] ? y1_out : y0_out) += 1;
    }
    if (y1_in + y0_in == 0 || y1_out + y0_out == 0)
        throw Error("subset_odds_ratio: subset or its complement is empty");
    double a = static_cast<double>(y1_in), b = static_cast<double>(y0_in);
    double c = static_cast<double>(y1_out), d = static_cast<double>(y0_out);
    if (y1_in == 0 || y0_in == 0 || y1_out == 0 || y0_out == 0) {
        a += 0.5;
        b += 0.5;
        c += 0.5;
        d += 0.5;
    }
    OddsRatioCi out;
    out.odds_ratio = (a * d) / (b * c);
    const double se = std::sqrt(1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
    out.low = std::exp(std::log(out.odds_ratio) - 1.96 * se);
    out.high = std::exp(std::log(out.odds_ratio) + 1.96 * se);
    return out;
}

double empirical_p(const dataset::LabeledPool& pool, double observed_score,
                   const discretize::BinningSpec& bins, Direction direction,
                   std::size_t permutations, std::size_t restarts, std::uint64_t seed,
                   const ScanParams& params) {
    if (permutations == 0) throw Error("empirical_p: permutations must be >= 1");
    const ScanData base = make_scan_data(pool, bins);
    const int threads = resolve_threads(params.threads);
    std::vector<std::uint8_t> exceed(permutations, 0);
    std::vector<std::string> errors(permutations);
    // Parallelism lives at the permutation level; restarts inside run serially.
    ScanParams inner = params;
    inner.threads = 1;
    auto run_one = [&](std::size_t p) {
        try {
            ScanData local = base;
            rng::Engine eng(rng::derive_seed(seed, 0x70657270ULL + p));
            eng.shuffle(local.labels);
            const RestartOutcome best =
                best_of_restarts(local, direction, restarts, rng::derive_seed(seed, p), inner);
            exceed[p] = best.score >= observed_score;
        } catch (const std::exception& e) {
            errors[p] = e.what();
        }
    };
    if (threads <= 1) {
        for (std::size_t p = 0; p < permutations; ++p) run_one(p);
    } else {
#pragma omp parallel for num_threads(threads) schedule(dynamic)
        for (long long p = 0; p < static_cast<long long>(permutations); ++p)
            run_one(static_cast<std::size_t>(p));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error(std::string("empirical_p: ") + e);
    const auto count = static_cast<std::size_t>(std::count(exceed.begin(), exceed.end(), 1));
    return static_cast<double>(1 + count) / static_cast<double>(1 + permutations);
}

std::string ScanResult::to_json() const {
    nlohmann::ordered_json doc;
    doc["direction"] = direction_name(direction);
    doc["subset"] = subset_text;
    nlohmann::ordered_json sel = nlohmann::ordered_json::array();
    for (const auto& s : subset.selected) sel.push_back(s);
    doc["subset_strata"] = sel;
    doc["group_size"] = group_size;
    doc["expected"] = expected;
    doc["observed"] = observed;
    doc["q_factor"] = q;
    doc["score"] = score;
    doc["odds_ratio"] = odds_ratio;
    doc["ci95"] = {ci_low, ci_high};
    if (p_value)
        doc["p_value"] = *p_value;
    else
        doc["p_value"] = nullptr;
    doc["elapsed_seconds"] = elapsed_seconds;
    doc["q_clamp"] = {kQMin, kQMax};
    return doc.dump(2);
}

std::string ScanResult::to_markdown(const std::string& model, const std::string& baseline) const {
    std::ostringstream md;
    md << "| Model | Baseline | Expected | Subset | Group size | Observed | q factor | Odds ratio | 95% CI "
          "| p-value | Score | Elapsed |\n";
    md << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    md << "| " << model << " | " << baseline << " | " << fmt_fixed3(expected) << " | " << subset_text
       << " | " << group_size << " | " << fmt_fixed3(observed) << " | " << fmt_fixed3(q) << " | "
       << fmt_fixed3(odds_ratio) << " | (" << fmt_fixed3(ci_low) << ", " << fmt_fixed3(ci_high) << ") | "
       << (p_value ? fmt_fixed3(*p_value) : std::string("-")) << " | " << fmt_fixed3(score) << " | "
       << fmt_fixed3(elapsed_seconds) << " |\n";
    return md.str();
}

}  // namespace mpego::gfa
