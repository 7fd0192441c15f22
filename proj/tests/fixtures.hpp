// Synthetic table builders shared by the test suites.
#pragma once

#include <string>
#include <vector>

#include "mpego/dataset.hpp"

namespace fixtures {

using mpego::dataset::FeatureKind;
using mpego::dataset::FeatureSchema;
using mpego::dataset::FeatureTable;

/// Mixed-schema table: two continuous columns (normal; the second shifted by
/// `shift`), one binary, one categorical over three tokens.
inline FeatureTable mixed_table(std::size_t n, std::uint64_t seed, const std::string& source,
                                double shift = 0.0) {
    FeatureSchema schema({"x", "y", "flag", "tag"},
                         {FeatureKind::continuous, FeatureKind::continuous, FeatureKind::binary,
                          FeatureKind::categorical});
    FeatureTable t(schema, source);
    mpego::rng::Engine eng(seed);
    const char* tags[3] = {"A", "B", "C"};
    for (std::size_t i = 0; i < n; ++i) {
        const double x = eng.normal();
        const double y = eng.normal() + shift;
        const std::string flag = eng.below(2) ? "1" : "0";
        const std::string tag = tags[eng.below(3)];
        t.append_row({mpego::fmt_double(x), mpego::fmt_double(y), flag, tag}, i + 1);
    }
    return t;
}

/// Continuous-only table with per-column mean offsets.
inline FeatureTable continuous_table(std::size_t n, std::uint64_t seed, const std::string& source,
                                     const std::vector<double>& offsets) {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;
    for (std::size_t c = 0; c < offsets.size(); ++c) {
        names.push_back("f" + std::to_string(c));
        kinds.push_back(FeatureKind::continuous);
    }
    FeatureTable t(FeatureSchema(names, kinds), source);
    mpego::rng::Engine eng(seed);
    std::vector<std::string> cells(offsets.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < offsets.size(); ++c)
            cells[c] = mpego::fmt_double(eng.normal() + offsets[c]);
        t.append_row(cells, i + 1);
    }
    return t;
}

/// Two binary features with a planted conjunction: rows with f1=1 AND f2=1
/// are generated with probability p_in, everything else with p_out. Returns
/// the merged pool directly.
inline mpego::dataset::LabeledPool planted_pool(std::size_t n, std::uint64_t seed, double p_in,
                                                double p_out) {
    FeatureSchema schema({"f1", "f2"}, {FeatureKind::binary, FeatureKind::binary});
    FeatureTable gen(schema, "gen"), ref(schema, "ref");
    mpego::rng::Engine eng(seed);
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool a = eng.below(2) == 1;
        const bool b = eng.below(2) == 1;
        const double p = (a && b) ? p_in : p_out;
        const bool is_gen = eng.unit() < p;
        (is_gen ? gen : ref).append_row({a ? "1" : "0", b ? "1" : "0"}, ++r);
    }
    return mpego::dataset::merge_label(gen, ref);
}

}  // namespace fixtures
