#include "mpego/hie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mpego::hie {

using measures::MeasureKind;

const char* weight_scheme_name(WeightScheme s) {
    switch (s) {
        case WeightScheme::uniform: return "uniform";
        case WeightScheme::support_weighted: return "support-weighted";
        case WeightScheme::custom: return "custom";
    }
    return "?";
}

WeightScheme weight_scheme_from_name(const std::string& name) {
    if (name == "uniform") return WeightScheme::uniform;
    if (name == "support-weighted") return WeightScheme::support_weighted;
    if (name == "custom") return WeightScheme::custom;
    throw ConfigError("unknown weight scheme '" + name + "' (expected uniform|support-weighted|custom)");
}

namespace {

void check_weights(const std::vector<double>& w) {
    if (w.empty()) throw Error("weights: empty");
    double sum = 0.0;
    for (const double x : w) {
        if (x < 0.0) throw Error("weights: negative weight");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("weights: sum " + fmt_double(sum) + " != 1");
}

}  // namespace

AggregationWeights AggregationWeights::uniform(std::size_t n) {
    if (n == 0) throw Error("weights: empty");
    AggregationWeights w;
    w.scheme = WeightScheme::uniform;
    w.weights.assign(n, 1.0 / static_cast<double>(n));
    return w;
}

AggregationWeights AggregationWeights::support(const std::vector<std::int64_t>& counts) {
    if (counts.empty()) throw Error("weights: empty");
    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (total <= 0) throw Error("weights: zero total support");
    AggregationWeights w;
    w.scheme = WeightScheme::support_weighted;
    w.weights.reserve(counts.size());
    for (const std::int64_t c : counts) {
        if (c < 0) throw Error("weights: negative support");
        w.weights.push_back(static_cast<double>(c) / static_cast<double>(total));
    }
    return w;
}

AggregationWeights AggregationWeights::custom(std::vector<double> w) {
    check_weights(w);
    AggregationWeights out;
    out.scheme = WeightScheme::custom;
    out.weights = std::move(w);
    return out;
}

std::vector<SisEntry> sis(const discretize::DiscretizedTable& gen, const discretize::DiscretizedTable& ref,
                          const std::string& feature, MeasureKind measure, double e_g,
                          std::vector<std::int32_t>* empty_strata) {
    if (!measures::consumes_pivot(measure))
        throw Error(std::string("sis: measure '") + measures::measure_name(measure) +
                    "' scores whole distributions; use fis_direct");
    const auto find = [&](const discretize::DiscretizedTable& t) {
        for (std::size_t i = 0; i < t.features.size(); ++i)
            if (t.features[i] == feature) return static_cast<int>(i);
        return -1;
    };
    const int gi = find(gen), ri = find(ref);
    if (gi < 0 || ri < 0) throw Error("sis: feature '" + feature + "' not present in both tables");
    const auto fgi = static_cast<std::size_t>(gi), fri = static_cast<std::size_t>(ri);
    if (gen.strata_count[fgi] != ref.strata_count[fri] || gen.labels[fgi] != ref.labels[fri])
        throw Error("sis: feature '" + feature + "' discretized differently in the two tables");

    const auto strata_count = static_cast<std::int32_t>(gen.strata_count[fgi]);
    const measures::NormalizationContext ctx{std::nullopt, e_g};
    std::vector<SisEntry> out;
    for (std::int32_t u = 0; u < strata_count; ++u) {
        const auto c = measures::pivot(gen.strata[fgi], ref.strata[fri], u, strata_count);
        if (c.alpha == 0 && c.delta == 0) {
            if (empty_strata) empty_strata->push_back(u);
            continue;
        }
        double score;
        if (c.beta == 0 && c.gamma == 0) {
            // Both populations lie entirely inside this stratum: the feature
            // cannot separate them.
            score = 1.0;
        } else {
            double raw = 0.0;
            switch (measure) {
                case MeasureKind::yules_y: raw = measures::yules_y(c); break;
                case MeasureKind::yules_q: raw = measures::yules_q(c); break;
                case MeasureKind::odds_ratio: raw = measures::odds_ratio_measure(c); break;
                case MeasureKind::mutual_information: raw = measures::mutual_information_2x2(c); break;
                case MeasureKind::gini: raw = measures::gini_measure(c); break;
                default: throw Error("sis: unreachable measure");
            }
            score = measures::to_independence(raw, measure, ctx).value;
        }
        out.push_back(SisEntry{u, gen.labels[fgi][static_cast<std::size_t>(u)], score, c.alpha + c.delta});
    }
    if (out.empty()) throw Error("sis: feature '" + feature + "' has no scorable strata");
    return out;
}

double fis(const std::vector<double>& sis_scores, const AggregationWeights& weights) {
    if (sis_scores.empty()) throw Error("fis: no scores");
    if (sis_scores.size() != weights.weights.size())
        throw Error("fis: " + std::to_string(sis_scores.size()) + " scores vs " +
                    std::to_string(weights.weights.size()) + " weights");
    check_weights(weights.weights);
    if (weights.scheme == WeightScheme::uniform) {
        const double sum = std::accumulate(sis_scores.begin(), sis_scores.end(), 0.0);
        return sum / static_cast<double>(sis_scores.size());
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < sis_scores.size(); ++i) acc += weights.weights[i] * sis_scores[i];
    return acc;
}

double fis_direct(std::span<const double> gen_values, std::span<const double> ref_values,
                  MeasureKind measure) {
    if (measures::consumes_pivot(measure))
        throw Error(std::string("fis_direct: measure '") + measures::measure_name(measure) +
                    "' consumes pivot tables; use sis + fis");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double v : gen_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (const double v : ref_values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    measures::NormalizationContext ctx;
    ctx.pooled_range = hi - lo;
    const double raw = measure == MeasureKind::wasserstein ? measures::wasserstein_1d(gen_values, ref_values)
                                                           : measures::ks_statistic(gen_values, ref_values);
    return measures::to_independence(raw, measure, ctx).value;
}

namespace {

double aggregate(const std::map<std::string, double>& fis_by_feature, const std::vector<std::string>& names,
                 const AggregationWeights& weights) {
    std::vector<double> scores;
    scores.reserve(names.size());
    for (const auto& n : names) {
        const auto it = fis_by_feature.find(n);
        if (it == fis_by_feature.end()) throw Error("aggregation: feature '" + n + "' has no FIS value");
        scores.push_back(it->second);
    }
    return fis(scores, weights);
}

}  // namespace

double safis(const std::map<std::string, double>& fis_by_feature, const std::vector<std::string>& selection,
             const AggregationWeights& weights) {
    if (selection.empty()) throw Error("safis: empty selection");
    std::set<std::string> unique(selection.begin(), selection.end());
    if (unique.size() != selection.size()) throw Error("safis: duplicate feature in selection");
    if (selection.size() >= fis_by_feature.size())
        throw Error("safis: selection covers every feature; use gafis");
    return aggregate(fis_by_feature, selection, weights);
}

double gafis(const std::map<std::string, double>& fis_by_feature, const AggregationWeights& weights) {
    if (fis_by_feature.empty()) throw Error("gafis: no features scored");
    std::vector<std::string> names;
    names.reserve(fis_by_feature.size());
    for (const auto& [n, _] : fis_by_feature) names.push_back(n);
    return aggregate(fis_by_feature, names, weights);
}

HieReport run_hie(const dataset::FeatureTable& gen, const dataset::FeatureTable& baseline,
                  const HieConfig& config) {
    if (gen.schema() != baseline.schema()) {
        const auto cols = dataset::FeatureSchema::diff(gen.schema(), baseline.schema());
        std::string msg = "run_hie: schema mismatch:";
        for (const auto& c : cols) msg += " [" + c + "]";
        throw Error(msg);
    }
    const auto pool = dataset::merge_label(gen, baseline);
    discretize::FitOptions fit;
    fit.method = config.method;
    fit.bins = config.bins;
    fit.population = config.bin_fit;
    fit.seed = config.seed;
    fit.threads = config.threads;
    const auto binning = discretize::fit_bins(pool, fit);
    const auto gen_disc = discretize::apply_bins(gen, binning);
    const auto base_disc = discretize::apply_bins(baseline, binning);
    const double e_g = dataset::expected_fraction(gen.rows(), baseline.rows());

    const auto& schema = gen.schema();
    const bool pivot_measure = measures::consumes_pivot(config.measure);

    HieReport report;
    report.gen_source = gen.source();
    report.baseline_source = baseline.source();
    report.config = config;
    report.binning = binning;
    report.features.resize(schema.size());

    const int threads = resolve_threads(config.threads);
    std::vector<std::string> errors(schema.size());
    auto score_one = [&](std::size_t c) {
        try {
            FeatureReport fr;
            fr.name = schema.names[c];
            if (pivot_measure) {
                fr.sis = sis(gen_disc, base_disc, fr.name, config.measure, e_g, &fr.empty_strata);
                std::vector<double> scores;
                std::vector<std::int64_t> support;
                scores.reserve(fr.sis.size());
                for (const auto& s : fr.sis) {
                    scores.push_back(s.score);
                    support.push_back(s.support);
                }
                const auto lambda = config.weights == WeightScheme::support_weighted
                                        ? AggregationWeights::support(support)
                                        : AggregationWeights::uniform(scores.size());
                fr.fis = fis(scores, lambda);
            } else if (schema.kinds[c] == dataset::FeatureKind::continuous) {
                fr.direct = true;
                fr.fis = fis_direct(gen.reals(c), baseline.reals(c), config.measure);
            } else {
                // Distribution measures need an ordered domain; categorical
                // features are excluded from this run.
                fr.skipped = true;
            }
            report.features[c] = std::move(fr);
        } catch (const std::exception& e) {
            errors[c] = std::string("feature '") + schema.names[c] + "': " + e.what();
        }
    };
    if (threads <= 1) {
        for (std::size_t c = 0; c < schema.size(); ++c) score_one(c);
    } else {
#pragma omp parallel for num_threads(threads) schedule(dynamic)
        for (long long c = 0; c < static_cast<long long>(schema.size()); ++c)
            score_one(static_cast<std::size_t>(c));
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error("run_hie: " + e);

    std::map<std::string, double> fis_by_feature;
    for (const auto& fr : report.features)
        if (!fr.skipped) fis_by_feature[fr.name] = fr.fis;
    if (fis_by_feature.empty()) throw Error("run_hie: no feature is scorable under this configuration");

    for (const auto& g : config.groups) {
        GroupReport gr;
        gr.name = g.name;
        gr.members = g.members;
        if (g.members.empty()) throw Error("run_hie: group '" + g.name + "' is empty");
        gr.score = g.members.size() < fis_by_feature.size()
                       ? safis(fis_by_feature, g.members, AggregationWeights::uniform(g.members.size()))
                       : aggregate(fis_by_feature, g.members, AggregationWeights::uniform(g.members.size()));
        report.safis.push_back(std::move(gr));
    }
    report.gafis = gafis(fis_by_feature, AggregationWeights::uniform(fis_by_feature.size()));
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string HieReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["comparison"] = {{"generated", gen_source}, {"baseline", baseline_source}};
    doc["config"] = {
        {"measure", measures::measure_name(config.measure)},
        {"normalization", measures::normalization_map(config.measure)},
        {"discretizer", discretize::method_name(config.method)},
        {"bins", config.bins},
        {"bin_fit", config.bin_fit == discretize::FitPopulation::pooled ? "pooled" : "reference"},
        {"weights", weight_scheme_name(config.weights)},
        {"seed", config.seed},
    };
    doc["binning"] = nlohmann::ordered_json::parse(binning.to_json());
    doc["features"] = nlohmann::ordered_json::array();
    for (const auto& fr : features) {
        nlohmann::ordered_json f;
        f["name"] = fr.name;
        if (fr.skipped) {
            f["skipped"] = true;
            doc["features"].push_back(f);
            continue;
        }
        if (!fr.direct) {
            f["sis"] = nlohmann::ordered_json::array();
            for (const auto& s : fr.sis)
                f["sis"].push_back({{"stratum", s.label}, {"score", s.score}, {"support", s.support}});
            if (!fr.empty_strata.empty()) f["empty_strata"] = fr.empty_strata;
        } else {
            f["direct"] = true;
        }
        f["fis"] = fr.fis;
        doc["features"].push_back(f);
    }
    doc["safis"] = nlohmann::ordered_json::array();
    for (const auto& g : safis)
        doc["safis"].push_back({{"group", g.name}, {"members", g.members}, {"score", g.score}});
    doc["gafis"] = gafis;
    return doc.dump(2);
}

std::string HieReport::to_markdown() const {
    std::ostringstream md;
    const std::string comparison = gen_source + " vs. " + baseline_source;
    md << "# Independence evaluation\n\n";
    md << "Measure: " << measures::measure_name(config.measure) << ", discretizer: "
       << discretize::method_name(config.method) << ", bins: " << config.bins
       << ", weights: " << weight_scheme_name(config.weights) << "\n\n";
    md << "| Level | Feature | " << comparison << " |\n";
    md << "|---|---|---|\n";
    for (const auto& fr : features) {
        if (fr.skipped) {
            md << "| FIS | " << fr.name << " | (skipped) |\n";
            continue;
        }
        md << "| FIS | " << fr.name << " | " << fmt_fixed3(fr.fis) << " |\n";
    }
    for (const auto& g : safis) {
        md << "| SAFIS | " << g.name << " (";
        for (std::size_t i = 0; i < g.members.size(); ++i) md << (i ? "+" : "") << g.members[i];
        md << ") | " << fmt_fixed3(g.score) << " |\n";
    }
    md << "| GAFIS |  | " << fmt_fixed3(gafis) << " |\n";

    // SIS detail per discretized feature, one block per feature.
    for (const auto& fr : features) {
        if (fr.skipped || fr.direct || fr.sis.empty()) continue;
        md << "\n## " << fr.name << "\n\n";
        md << "| Level | " << fr.name << " range | " << comparison << " |\n";
        md << "|---|---|---|\n";
        for (const auto& s : fr.sis)
            md << "| SIS | " << s.label << " | " << fmt_fixed3(s.score) << " |\n";
    }
    return md.str();
}

}  // namespace mpego::hie
