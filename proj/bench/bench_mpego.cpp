// Serial vs OpenMP comparison for the scan and scoring kernels.
// Run: ./bench/mpego_bench [--benchmark_filter=...]
#include <benchmark/benchmark.h>

#include "mpego/gfa.hpp"
#include "mpego/hie.hpp"

using namespace mpego;

namespace {

dataset::FeatureTable synth_table(std::size_t n, std::uint64_t seed, const std::string& source,
                                  double shift) {
    std::vector<std::string> names;
    std::vector<dataset::FeatureKind> kinds;
    for (int c = 0; c < 6; ++c) {
        names.push_back("f" + std::to_string(c));
        kinds.push_back(dataset::FeatureKind::continuous);
    }
    dataset::FeatureTable t(dataset::FeatureSchema(names, kinds), source);
    rng::Engine eng(seed);
    std::vector<std::string> cells(6);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < 6; ++c)
            cells[static_cast<std::size_t>(c)] = fmt_double(eng.normal() + (c % 2 ? shift : 0.0));
        t.append_row(cells, i + 1);
    }
    return t;
}

struct BenchData {
    dataset::FeatureTable gen = synth_table(10000, 1, "gen", 0.6);
    dataset::FeatureTable ref = synth_table(10000, 2, "ref", 0.0);
    dataset::LabeledPool pool = dataset::merge_label(gen, ref);
    discretize::BinningSpec bins;
    BenchData() {
        discretize::FitOptions fit;
        fit.threads = 1;
        bins = discretize::fit_bins(pool, fit);
    }
};

BenchData& data() {
    static BenchData d;
    return d;
}

void bm_hie(benchmark::State& state, int threads) {
    auto& d = data();
    hie::HieConfig cfg;
    cfg.threads = threads;
    for (auto _ : state) {
        const auto report = hie::run_hie(d.gen, d.ref, cfg);
        benchmark::DoNotOptimize(report.gafis);
    }
}

void bm_scan(benchmark::State& state, int threads) {
    auto& d = data();
    gfa::ScanParams params;
    params.threads = threads;
    for (auto _ : state) {
        const auto result = gfa::scan(d.pool, d.bins, gfa::Direction::over, 10, 7, params);
        benchmark::DoNotOptimize(result.score);
    }
}

void bm_permutation(benchmark::State& state, int threads) {
    auto& d = data();
    gfa::ScanParams params;
    params.threads = threads;
    const auto observed = gfa::scan(d.pool, d.bins, gfa::Direction::over, 5, 7, params);
    for (auto _ : state) {
        const double p =
            gfa::empirical_p(d.pool, observed.score, d.bins, gfa::Direction::over, 20, 5, 7, params);
        benchmark::DoNotOptimize(p);
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_hie, serial, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_hie, openmp, 0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_scan, serial, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_scan, openmp, 0)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_permutation, serial, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_permutation, openmp, 0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
