#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include "mpego/dataset.hpp"

using namespace mpego;
using namespace mpego::dataset;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/mpego_test_" + name) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("load a small csv with explicit schema") {
    TempFile f("basic.csv", "LogP,Ring\n1.5,0\n-0.25,1\n3.75,0\n");
    FeatureSchema schema({"LogP", "Ring"}, {FeatureKind::continuous, FeatureKind::binary});
    const auto t = load_table(f.path, schema, "gen");
    CHECK(t.rows() == 3);
    CHECK(t.cols() == 2);
    CHECK(t.reals(0)[0] == 1.5);
    CHECK(t.token_at(1, 1) == "1");
    CHECK(t.source() == "gen");
}

TEST_CASE("unparseable continuous cell names row and column") {
    TempFile f("bad.csv", "LogP,Ring\n1.5,0\nabc,1\n");
    FeatureSchema schema({"LogP", "Ring"}, {FeatureKind::continuous, FeatureKind::binary});
    try {
        load_table(f.path, schema, "gen");
        FAIL("expected an error");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("LogP") != std::string::npos);
    }
}

TEST_CASE("wrong cell count and missing cells") {
    TempFile f("short.csv", "A,B\n1,2\n3\n");
    CHECK_THROWS(load_table(f.path, std::nullopt, "x"));

    TempFile g("missing.csv", "A,B\n1,\n3,4\n");
    FeatureSchema schema({"A", "B"}, {FeatureKind::categorical, FeatureKind::categorical});
    CHECK_THROWS(load_table(g.path, schema, "x"));
    LoadOptions opts;
    opts.drop_incomplete = true;
    const auto t = load_table(g.path, schema, "x", opts);
    CHECK(t.rows() == 1);
}

TEST_CASE("schema inference rules") {
    std::string csv = "bin,cat,cont\n";
    for (int i = 0; i < 100; ++i)
        csv += std::to_string(i % 2) + "," + std::string(1, static_cast<char>('A' + i % 3)) + "," +
               std::to_string(i) + ".5\n";
    TempFile f("infer.csv", csv);
    const auto schema = infer_schema(f.path);
    CHECK(schema.kinds[0] == FeatureKind::binary);
    CHECK(schema.kinds[1] == FeatureKind::categorical);
    CHECK(schema.kinds[2] == FeatureKind::continuous);

    // numeric column with few distinct values stays categorical
    std::string csv2 = "x\n";
    for (int i = 0; i < 50; ++i) csv2 += std::to_string(i % 5) + "\n";
    TempFile f2("infer2.csv", csv2);
    CHECK(infer_schema(f2.path).kinds[0] == FeatureKind::categorical);

    TempFile f3("empty.csv", "");
    CHECK_THROWS(infer_schema(f3.path));
}

TEST_CASE("load then save round-trips") {
    TempFile f("round.csv", "a,b,c\n0.125,x,1\n-3.5,y,0\n7,x,1\n");
    FeatureSchema schema({"a", "b", "c"},
                         {FeatureKind::continuous, FeatureKind::categorical, FeatureKind::binary});
    const auto t = load_table(f.path, schema, "src");
    const std::string out1 = "/tmp/mpego_test_round_out1.csv";
    t.save_csv(out1);
    const auto t2 = load_table(out1, schema, "src");
    CHECK(t == t2);
    const std::string out2 = "/tmp/mpego_test_round_out2.csv";
    t2.save_csv(out2);
    CHECK(slurp(out1) == slurp(out2));
    std::remove(out1.c_str());
    std::remove(out2.c_str());
}

TEST_CASE("subsample is deterministic and without replacement") {
    FeatureSchema schema({"v"}, {FeatureKind::continuous});
    FeatureTable t(schema, "src");
    for (int i = 0; i < 500; ++i) t.append_row({std::to_string(i)}, i + 1);

    const auto s1 = subsample(t, 40, 7);
    const auto s2 = subsample(t, 40, 7);
    CHECK(s1 == s2);
    CHECK(s1.rows() == 40);
    std::set<double> seen;
    for (std::size_t r = 0; r < s1.rows(); ++r) {
        const double v = s1.reals(0)[r];
        CHECK(seen.insert(v).second);  // distinct rows
        CHECK(v >= 0.0);
        CHECK(v < 500.0);
    }
    const auto s3 = subsample(t, 40, 8);
    CHECK_FALSE(s1 == s3);

    const auto all = subsample(t, 500, 3);
    CHECK(all.rows() == 500);
    CHECK_THROWS(subsample(t, 501, 3));
    CHECK_THROWS(subsample(t, 0, 3));

    // resampling a subsample stays inside the original rows
    const auto nested = subsample(s1, 10, 99);
    for (std::size_t r = 0; r < nested.rows(); ++r) CHECK(seen.count(nested.reals(0)[r]) == 1);
}

TEST_CASE("merge_label expectation and swap symmetry") {
    FeatureSchema schema({"v"}, {FeatureKind::continuous});
    FeatureTable g(schema, "gen"), r(schema, "ref");
    for (int i = 0; i < 1; ++i) g.append_row({"1.0"}, 1);
    for (int i = 0; i < 3; ++i) r.append_row({"2.0"}, i + 1);

    const auto pool = merge_label(g, r);
    CHECK(pool.e_g == 0.25);
    CHECK(pool.labels.size() == 4);
    CHECK(pool.labels[0] == 1);
    CHECK(pool.labels[3] == 0);
    CHECK(pool.table.rows() == 4);

    // exact complement under swapped arguments, across odd totals too
    for (const auto& [a, b] : {std::pair<int, int>{1, 3}, {2, 3}, {7, 13}, {5000, 5000}, {1, 999}}) {
        FeatureTable ga(schema, "a"), rb(schema, "b");
        for (int i = 0; i < a; ++i) ga.append_row({"1"}, i + 1);
        for (int i = 0; i < b; ++i) rb.append_row({"2"}, i + 1);
        CHECK(merge_label(ga, rb).e_g + merge_label(rb, ga).e_g == 1.0);
    }

    FeatureTable balanced_g(schema, "g5000"), balanced_r(schema, "r5000");
    for (int i = 0; i < 5000; ++i) balanced_g.append_row({"1"}, i + 1);
    for (int i = 0; i < 5000; ++i) balanced_r.append_row({"2"}, i + 1);
    CHECK(merge_label(balanced_g, balanced_r).e_g == 0.5);
}

TEST_CASE("merge_label rejects schema mismatch naming columns") {
    FeatureTable g(FeatureSchema({"a", "b"}, {FeatureKind::continuous, FeatureKind::binary}), "gen");
    g.append_row({"1.0", "0"}, 1);
    FeatureTable r(FeatureSchema({"a"}, {FeatureKind::continuous}), "ref");
    r.append_row({"1.0"}, 1);
    try {
        merge_label(g, r);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
}

TEST_CASE("schema sidecar round trip") {
    FeatureSchema schema({"LogP", "Ring"}, {FeatureKind::continuous, FeatureKind::binary});
    const std::string path = "/tmp/mpego_test_sidecar.json";
    save_schema_sidecar(schema, path);
    const auto loaded = schema_from_sidecar(path, {"LogP", "Ring"});
    CHECK(loaded == schema);
    CHECK_THROWS(schema_from_sidecar(path, {"LogP", "Missing"}));
    std::remove(path.c_str());
}

TEST_CASE("binary column with three values is rejected") {
    TempFile f("tri.csv", "b\n0\n1\n2\n");
    FeatureSchema schema({"b"}, {FeatureKind::binary});
    CHECK_THROWS(load_table(f.path, schema, "x"));
}

TEST_CASE("tsv delimiter") {
    TempFile f("tabbed.tsv", "a\tb\n1.5\tx\n2.5\ty\n");
    LoadOptions opts;
    opts.delimiter = '\t';
    FeatureSchema schema({"a", "b"}, {FeatureKind::continuous, FeatureKind::categorical});
    const auto t = load_table(f.path, schema, "x", opts);
    CHECK(t.rows() == 2);
    CHECK(t.reals(0)[1] == 2.5);
}
