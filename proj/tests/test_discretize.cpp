#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "mpego/discretize.hpp"
#include "oracles.hpp"

using namespace mpego;
using namespace mpego::discretize;

namespace {

std::vector<double> iota_values(int n, double scale = 1.0, double offset = 0.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = offset + scale * (i + 1);
    return v;
}

std::vector<std::size_t> bin_populations(const std::vector<double>& values,
                                         const std::vector<double>& cuts) {
    std::vector<std::size_t> pop(cuts.size() + 1, 0);
    for (const double v : values) ++pop[static_cast<std::size_t>(stratum_of(v, cuts))];
    return pop;
}

}  // namespace

TEST_CASE("equal width cut arithmetic") {
    std::vector<double> v = {0.0, 10.0};
    const auto cuts = equal_width(v, 5);
    REQUIRE(cuts.size() == 4);
    CHECK(cuts[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cuts[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(cuts[2] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(cuts[3] == doctest::Approx(8.0).epsilon(1e-12));

    CHECK(equal_width(std::vector<double>{0.0, 100.0}, 2) == std::vector<double>{50.0});
    CHECK_THROWS(equal_width(std::vector<double>{1.0, 1.0, 1.0}, 3));
    CHECK_THROWS(equal_width(v, 1));
}

TEST_CASE("equal frequency on distinct values") {
    const auto v = iota_values(100);  // 1..100
    const auto cuts = equal_frequency(v, 5);
    REQUIRE(cuts.size() == 4);
    CHECK(cuts[0] == 21.0);
    CHECK(cuts[1] == 41.0);
    CHECK(cuts[2] == 61.0);
    CHECK(cuts[3] == 81.0);
    const auto pop = bin_populations(v, cuts);
    for (const auto p : pop) CHECK(p == 20);
}

TEST_CASE("equal frequency collapses duplicate boundaries") {
    std::vector<double> v(90, 0.0);
    v.insert(v.end(), 10, 1.0);
    const auto cuts = equal_frequency(v, 5);
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0] == 1.0);
    const auto pop = bin_populations(v, cuts);
    CHECK(pop[0] == 90);
    CHECK(pop[1] == 10);

    CHECK_THROWS(equal_frequency(std::vector<double>{2.0, 2.0}, 2));
}

TEST_CASE("equal frequency bin balance bound on random distinct samples") {
    rng::Engine eng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 20 + eng.below(400);
        const std::size_t k = 2 + eng.below(7);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = static_cast<double>(i) + 0.4 * eng.unit();  // strictly increasing -> distinct
        eng.shuffle(v);
        const auto cuts = equal_frequency(v, k);
        const auto pop = bin_populations(v, cuts);
        const auto [mn, mx] = std::minmax_element(pop.begin(), pop.end());
        const std::size_t bound = n % k == 0 ? 1 : (n + k - 1) / k - n / k + 1;
        CHECK(*mx - *mn <= bound);
    }
}

TEST_CASE("equal frequency strata are invariant under monotone transforms") {
    rng::Engine eng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 30 + eng.below(200);
        const std::size_t k = 2 + eng.below(5);
        std::vector<double> v(n);
        for (auto& x : v) x = eng.unit() * 8.0 - 4.0;
        const auto cuts = equal_frequency(v, k);
        std::vector<double> tv(v);
        for (auto& x : tv) x = x * x * x;  // strictly increasing on all reals
        const auto tcuts = equal_frequency(tv, k);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(stratum_of(v[i], cuts) == stratum_of(tv[i], tcuts));
    }
}

TEST_CASE("kmeans recovers the obvious two clusters") {
    const std::vector<double> v = {0.0, 0.1, 0.2, 10.0, 10.1, 10.2};
    const auto cuts = kmeans_1d(v, 2, 17);
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0] == doctest::Approx(5.1).epsilon(1e-9));
    CHECK(cuts[0] == doctest::Approx(oracles::best_two_means_cut(v)).epsilon(1e-9));
}

TEST_CASE("kmeans with k equal to distinct count isolates every value") {
    const std::vector<double> v = {1.0, 1.0, 2.0, 3.0, 3.0};
    const auto cuts = kmeans_1d(v, 3, 5);
    REQUIRE(cuts.size() == 2);
    CHECK(stratum_of(1.0, cuts) == 0);
    CHECK(stratum_of(2.0, cuts) == 1);
    CHECK(stratum_of(3.0, cuts) == 2);
    CHECK_THROWS(kmeans_1d(v, 4, 5));
}

TEST_CASE("kmeans is deterministic under a fixed seed") {
    rng::Engine eng(3);
    std::vector<double> v(300);
    for (auto& x : v) x = eng.normal() * 3.0;
    CHECK(kmeans_1d(v, 4, 123) == kmeans_1d(v, 4, 123));
}

TEST_CASE("kmeans lloyd cost never increases") {
    rng::Engine eng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 20 + eng.below(300);
        std::vector<double> v(n);
        for (auto& x : v) x = eng.normal() * (1.0 + eng.unit() * 4.0);
        const std::size_t k = 2 + eng.below(5);
        const auto trace = kmeans_1d_trace(v, k, trial);
        for (std::size_t i = 1; i < trace.iteration_costs.size(); ++i)
            CHECK(trace.iteration_costs[i] <= trace.iteration_costs[i - 1] + 1e-9);
    }
}

TEST_CASE("fit and apply bins over a mixed-schema pool") {
    dataset::FeatureSchema schema({"x", "tag"},
                                  {dataset::FeatureKind::continuous, dataset::FeatureKind::categorical});
    dataset::FeatureTable g(schema, "gen"), r(schema, "ref");
    for (int i = 0; i < 30; ++i) g.append_row({std::to_string(i) + ".0", i % 2 ? "A" : "B"}, i + 1);
    for (int i = 30; i < 60; ++i) r.append_row({std::to_string(i) + ".0", i % 3 ? "C" : "A"}, i + 1);
    const auto pool = dataset::merge_label(g, r);

    FitOptions opts;
    opts.method = Method::equal_frequency;
    opts.bins = 3;
    const auto spec = fit_bins(pool, opts);
    REQUIRE(spec.features.size() == 2);
    CHECK_FALSE(spec.per_feature[0].identity);
    CHECK(spec.per_feature[0].cuts.size() <= 2);
    CHECK(spec.per_feature[1].identity);
    CHECK(spec.per_feature[1].categories == std::vector<std::string>{"A", "B", "C"});

    const auto disc = apply_bins(g, spec);
    CHECK(disc.rows == 30);
    CHECK(disc.strata_count[1] == 3);
    // partition property: exactly one stratum per row and feature
    for (std::size_t f = 0; f < 2; ++f)
        for (std::size_t row = 0; row < disc.rows; ++row) {
            CHECK(disc.strata[f][row] >= 0);
            CHECK(disc.strata[f][row] < static_cast<std::int32_t>(disc.strata_count[f]));
        }

    // identity spec for a purely categorical pool
    dataset::FeatureSchema cat_schema({"tag"}, {dataset::FeatureKind::categorical});
    dataset::FeatureTable cg(cat_schema, "g"), cr(cat_schema, "r");
    cg.append_row({"A"}, 1);
    cr.append_row({"B"}, 1);
    const auto cat_spec = fit_bins(dataset::merge_label(cg, cr), opts);
    CHECK(cat_spec.per_feature[0].identity);
}

TEST_CASE("boundary values land in the right-hand interval") {
    const std::vector<double> cuts = {2.0, 4.0};
    CHECK(stratum_of(1.9, cuts) == 0);
    CHECK(stratum_of(2.0, cuts) == 1);
    CHECK(stratum_of(3.999, cuts) == 1);
    CHECK(stratum_of(4.0, cuts) == 2);
    CHECK(stratum_of(-100.0, cuts) == 0);
    CHECK(stratum_of(100.0, cuts) == 2);
}

TEST_CASE("stratum labels follow the half-open convention") {
    FeatureBinning b;
    b.cuts = {201.63, 258.1, 308.39, 361.47};
    CHECK(b.stratum_label(0) == "<201.63");
    CHECK(b.stratum_label(1) == "[201.63 , 258.1)");
    CHECK(b.stratum_label(4) == "≥361.47");
}

TEST_CASE("binning spec json round trip") {
    FeatureBinning cont;
    cont.cuts = {1.0, 2.5};
    FeatureBinning cat;
    cat.identity = true;
    cat.categories = {"x", "y"};
    BinningSpec spec;
    spec.features = {"a", "b"};
    spec.per_feature = {cont, cat};
    const auto text = spec.to_json();
    const auto back = BinningSpec::from_json(text);
    CHECK(back.features == spec.features);
    CHECK(back.per_feature[0].cuts == cont.cuts);
    CHECK(back.per_feature[1].categories == cat.categories);
    CHECK_THROWS(BinningSpec::from_json("{\"a\": [2.0, 1.0]}"));
}

TEST_CASE("apply_bins rejects unknown categories and missing features") {
    dataset::FeatureSchema schema({"tag"}, {dataset::FeatureKind::categorical});
    dataset::FeatureTable t(schema, "x");
    t.append_row({"NEW"}, 1);
    BinningSpec spec;
    spec.features = {"tag"};
    FeatureBinning b;
    b.identity = true;
    b.categories = {"A", "B"};
    spec.per_feature = {b};
    CHECK_THROWS(apply_bins(t, spec));

    BinningSpec empty_spec;
    CHECK_THROWS(apply_bins(t, empty_spec));
}
