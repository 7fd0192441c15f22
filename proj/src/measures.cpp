#include "mpego/measures.hpp"

#include <algorithm>
#include <cmath>

namespace mpego::measures {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

const char* measure_name(MeasureKind m) {
    switch (m) {
        case MeasureKind::yules_y: return "yules-y";
        case MeasureKind::yules_q: return "yules-q";
        case MeasureKind::odds_ratio: return "odds-ratio";
        case MeasureKind::mutual_information: return "mutual-information";
        case MeasureKind::gini: return "gini";
        case MeasureKind::wasserstein: return "wasserstein";
        case MeasureKind::ks: return "ks";
    }
    return "?";
}

MeasureKind measure_from_name(const std::string& name) {
    for (const MeasureKind m : all_measures())
        if (name == measure_name(m)) return m;
    std::string valid;
    for (const MeasureKind m : all_measures()) valid += std::string(" ") + measure_name(m);
    throw ConfigError("unknown measure '" + name + "' (expected one of:" + valid + ")");
}

std::vector<MeasureKind> all_measures() {
    return {MeasureKind::yules_y,  MeasureKind::yules_q,     MeasureKind::odds_ratio,
            MeasureKind::mutual_information, MeasureKind::gini, MeasureKind::wasserstein,
            MeasureKind::ks};
}

bool consumes_pivot(MeasureKind m) {
    return m != MeasureKind::wasserstein && m != MeasureKind::ks;
}

std::string normalization_map(MeasureKind m) {
    switch (m) {
        case MeasureKind::yules_y: return "1 - |Y|";
        case MeasureKind::yules_q: return "1 - |Q|";
        case MeasureKind::odds_ratio: return "1 - |OR-1|/(OR+1)";
        case MeasureKind::mutual_information: return "1 - MI/ln(2), clamped to [0,1]";
        case MeasureKind::gini: return "1 - gain/(2*e_g*(1-e_g)), clamped to [0,1]";
        case MeasureKind::wasserstein: return "1 - W1/pooled_range, clamped to [0,1]";
        case MeasureKind::ks: return "1 - D";
    }
    return "?";
}

PivotCounts pivot(std::span<const std::int32_t> gen_strata, std::span<const std::int32_t> ref_strata,
                  std::int32_t u, std::int32_t strata_count) {
    if (u < 0 || u >= strata_count)
        throw Error("pivot: stratum " + std::to_string(u) + " out of range [0, " +
                    std::to_string(strata_count) + ")");
    if (gen_strata.empty() || ref_strata.empty()) throw Error("pivot: empty population");
    PivotCounts c;
    for (const std::int32_t s : gen_strata) c.alpha += (s == u);
    for (const std::int32_t s : ref_strata) c.delta += (s == u);
    c.beta = static_cast<std::int64_t>(gen_strata.size()) - c.alpha;
    c.gamma = static_cast<std::int64_t>(ref_strata.size()) - c.delta;
    return c;
}

double yules_y(const PivotCounts& c) {
    const double ag = static_cast<double>(c.alpha) * static_cast<double>(c.gamma);
    const double bd = static_cast<double>(c.beta) * static_cast<double>(c.delta);
    if (ag == 0.0 && bd == 0.0) throw Error("yules_y: both cell products are zero (0/0)");
    const double sag = std::sqrt(ag), sbd = std::sqrt(bd);
    return (sag - sbd) / (sag + sbd);
}

double yules_q(const PivotCounts& c) {
    const double ag = static_cast<double>(c.alpha) * static_cast<double>(c.gamma);
    const double bd = static_cast<double>(c.beta) * static_cast<double>(c.delta);
    if (ag == 0.0 && bd == 0.0) throw Error("yules_q: both cell products are zero (0/0)");
    return (ag - bd) / (ag + bd);
}

double odds_ratio_measure(const PivotCounts& c) {
    double a = static_cast<double>(c.alpha), b = static_cast<double>(c.beta);
    double d = static_cast<double>(c.delta), g = static_cast<double>(c.gamma);
    if (c.alpha == 0 || c.beta == 0 || c.delta == 0 || c.gamma == 0) {
        // Haldane-Anscombe continuity correction.
        a += 0.5;
        b += 0.5;
        d += 0.5;
        g += 0.5;
    }
    return (a * g) / (b * d);
}

double mutual_information_2x2(const PivotCounts& c) {
    const std::int64_t n = c.total();
    if (n <= 0) throw Error("mutual_information: empty table");
    // Exact independence (alpha*gamma == beta*delta) carries zero information.
    if (c.alpha * c.gamma == c.beta * c.delta) return 0.0;
    const double nd = static_cast<double>(n);
    const double cells[2][2] = {{static_cast<double>(c.alpha), static_cast<double>(c.beta)},
                                {static_cast<double>(c.delta), static_cast<double>(c.gamma)}};
    const double row[2] = {cells[0][0] + cells[0][1], cells[1][0] + cells[1][1]};
    const double col[2] = {cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]};
    double mi = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (cells[i][j] == 0.0) continue;
            const double pij = cells[i][j] / nd;
            mi += pij * std::log(pij * nd * nd / (row[i] * col[j]));
        }
    }
    return std::max(mi, 0.0);
}

double gini_measure(const PivotCounts& c) {
    const std::int64_t n = c.total();
    if (n <= 0) throw Error("gini: empty table");
    if (c.alpha * c.gamma == c.beta * c.delta) return 0.0;
    const double nd = static_cast<double>(n);
    auto gini = [](double p1, double p0) {
        const double s = p1 + p0;
        if (s == 0.0) return 0.0;
        const double a = p1 / s, b = p0 / s;
        return 1.0 - a * a - b * b;
    };
    const double gen = static_cast<double>(c.alpha + c.beta);
    const double ref = static_cast<double>(c.delta + c.gamma);
    const double in_sz = static_cast<double>(c.alpha + c.delta);
    const double out_sz = static_cast<double>(c.beta + c.gamma);
    const double total_gini = gini(gen, ref);
    const double split = in_sz / nd * gini(static_cast<double>(c.alpha), static_cast<double>(c.delta)) +
                         out_sz / nd * gini(static_cast<double>(c.beta), static_cast<double>(c.gamma));
    return std::max(total_gini - split, 0.0);
}

double wasserstein_1d(std::span<const double> gen_values, std::span<const double> ref_values) {
    if (gen_values.empty() || ref_values.empty()) throw Error("wasserstein_1d: empty input");
    std::vector<double> a(gen_values.begin(), gen_values.end());
    std::vector<double> b(ref_values.begin(), ref_values.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // Area between the two empirical CDFs.
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double dist = 0.0;
    double prev = std::min(a[0], b[0]);
    while (i < a.size() || j < b.size()) {
        const double x = (i < a.size() && (j == b.size() || a[i] <= b[j])) ? a[i] : b[j];
        dist += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (x - prev);
        prev = x;
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
    }
    return dist;
}

double ks_statistic(std::span<const double> gen_values, std::span<const double> ref_values) {
    if (gen_values.empty() || ref_values.empty()) throw Error("ks_statistic: empty input");
    std::vector<double> a(gen_values.begin(), gen_values.end());
    std::vector<double> b(ref_values.begin(), ref_values.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double sup = 0.0;
    while (i < a.size() || j < b.size()) {
        const double x = (i < a.size() && (j == b.size() || a[i] <= b[j])) ? a[i] : b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return sup;
}

IndependenceScore to_independence(double raw, MeasureKind kind, const NormalizationContext& ctx) {
    double score = 0.0;
    switch (kind) {
        case MeasureKind::yules_y:
        case MeasureKind::yules_q:
            score = 1.0 - std::abs(raw);
            break;
        case MeasureKind::ks:
            score = 1.0 - raw;
            break;
        case MeasureKind::odds_ratio:
            if (raw <= 0.0) throw Error("to_independence: odds ratio must be positive");
            score = 1.0 - std::abs(raw - 1.0) / (raw + 1.0);
            break;
        case MeasureKind::mutual_information:
            score = 1.0 - raw / kLn2;
            break;
        case MeasureKind::gini: {
            if (!ctx.e_g) throw Error("to_independence: gini normalization needs e_g context");
            const double e = *ctx.e_g;
            if (e <= 0.0 || e >= 1.0) throw Error("to_independence: e_g must lie in (0,1)");
            score = 1.0 - raw / (2.0 * e * (1.0 - e));
            break;
        }
        case MeasureKind::wasserstein: {
            if (!ctx.pooled_range) throw Error("to_independence: wasserstein normalization needs pooled range");
            if (*ctx.pooled_range > 0.0)
                score = 1.0 - raw / *ctx.pooled_range;
            else
                score = raw == 0.0 ? 1.0 : 0.0;  // degenerate pooled support
            break;
        }
    }
    score = std::clamp(score, 0.0, 1.0);
    return IndependenceScore{score, kind};
}

}  // namespace mpego::measures
