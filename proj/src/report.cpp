#include "mpego/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mpego::report {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
}

ordered_json config_json(const EvaluationConfig& c) {
    ordered_json doc;
    doc["generated"] = c.generated;
    doc["reference"] = c.reference;
    if (c.generated_baseline) doc["generated_baseline"] = *c.generated_baseline;
    if (c.schema_path) doc["schema"] = *c.schema_path;
    doc["delimiter"] = c.delimiter == '\t' ? "tab" : "comma";
    doc["drop_incomplete"] = c.drop_incomplete;
    if (c.subsample) doc["subsample"] = *c.subsample;
    doc["seed"] = c.seed;
    doc["discretizer"] = discretize::method_name(c.discretizer);
    doc["bins"] = c.bins;
    doc["bin_fit"] = c.bin_fit == discretize::FitPopulation::pooled ? "pooled" : "reference";
    ordered_json ms = ordered_json::array();
    for (const auto m : c.measures_list) ms.push_back(measures::measure_name(m));
    doc["measures"] = ms;
    doc["weights"] = hie::weight_scheme_name(c.weights);
    if (!c.groups.empty()) {
        ordered_json gs;
        for (const auto& g : c.groups) gs[g.name] = g.members;
        doc["groups"] = gs;
    }
    doc["hie"] = c.run_hie;
    doc["gfa"] = c.run_gfa;
    if (c.run_gfa) {
        doc["direction"] = gfa::direction_name(c.direction);
        doc["restarts"] = c.restarts;
        doc["permutations"] = c.permutations;
        doc["min_subset_size"] = c.min_subset_size;
        doc["balance"] = c.balance;
    }
    return doc;
}

}  // namespace

namespace {

std::vector<std::string> validation_problems(const EvaluationConfig& config) {
    std::vector<std::string> problems;
    if (config.generated.empty()) problems.push_back("no generated table given");
    for (const auto& g : config.generated)
        if (!fs::exists(g)) problems.push_back("generated file not found: " + g);
    if (config.generated_baseline) {
        if (!fs::exists(*config.generated_baseline))
            problems.push_back("baseline file not found: " + *config.generated_baseline);
    } else if (config.reference.empty()) {
        problems.push_back("no reference table given");
    } else if (!fs::exists(config.reference)) {
        problems.push_back("reference file not found: " + config.reference);
    }
    if (config.schema_path && !fs::exists(*config.schema_path))
        problems.push_back("schema file not found: " + *config.schema_path);
    if (!config.run_hie && !config.run_gfa)
        problems.push_back("no analysis requested (enable hie and/or gfa)");
    if (config.bins < 2) problems.push_back("bins must be >= 2");
    if (config.measures_list.empty()) problems.push_back("no measure given");
    if (config.run_gfa && config.restarts == 0) problems.push_back("restarts must be >= 1");
    if (config.run_gfa && config.permutations == 0) problems.push_back("permutations must be >= 1");
    if (config.subsample && *config.subsample == 0) problems.push_back("subsample must be positive");
    std::set<std::string> group_names;
    for (const auto& g : config.groups) {
        if (g.name.empty()) problems.push_back("group with empty name");
        if (g.members.empty()) problems.push_back("group '" + g.name + "' has no members");
        if (!group_names.insert(g.name).second) problems.push_back("duplicate group '" + g.name + "'");
    }
    return problems;
}

[[noreturn]] void throw_problems(const std::vector<std::string>& problems) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ConfigError(msg);
}

}  // namespace

void validate(const EvaluationConfig& config) {
    const auto problems = validation_problems(config);
    if (!problems.empty()) throw_problems(problems);
}

EvaluationConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    EvaluationConfig c;
    std::vector<std::string> problems;
    auto get = [&](const char* key, auto&& fn) {
        if (!doc.contains(key)) return;
        try {
            fn(doc.at(key));
        } catch (const std::exception& e) {
            problems.push_back(std::string(key) + ": " + e.what());
        }
    };

    get("generated", [&](const ordered_json& v) {
        if (v.is_string())
            c.generated = {v.get<std::string>()};
        else
            c.generated = v.get<std::vector<std::string>>();
    });
    get("reference", [&](const ordered_json& v) { c.reference = v.get<std::string>(); });
    get("generated_baseline", [&](const ordered_json& v) { c.generated_baseline = v.get<std::string>(); });
    get("schema", [&](const ordered_json& v) { c.schema_path = v.get<std::string>(); });
    get("delimiter", [&](const ordered_json& v) {
        const auto s = v.get<std::string>();
        if (s == "comma") c.delimiter = ',';
        else if (s == "tab") c.delimiter = '\t';
        else throw ConfigError("expected comma|tab");
    });
    get("drop_incomplete", [&](const ordered_json& v) { c.drop_incomplete = v.get<bool>(); });
    get("subsample", [&](const ordered_json& v) { c.subsample = v.get<std::size_t>(); });
    get("seed", [&](const ordered_json& v) { c.seed = v.get<std::uint64_t>(); });
    get("discretizer", [&](const ordered_json& v) {
        c.discretizer = discretize::method_from_name(v.get<std::string>());
    });
    get("bins", [&](const ordered_json& v) { c.bins = v.get<std::size_t>(); });
    get("bin_fit", [&](const ordered_json& v) {
        const auto s = v.get<std::string>();
        if (s == "pooled") c.bin_fit = discretize::FitPopulation::pooled;
        else if (s == "reference") c.bin_fit = discretize::FitPopulation::reference;
        else throw ConfigError("expected pooled|reference");
    });
    get("measure", [&](const ordered_json& v) {
        const auto s = v.get<std::string>();
        c.measures_list = s == "all" ? measures::all_measures()
                                     : std::vector<measures::MeasureKind>{measures::measure_from_name(s)};
    });
    get("measures", [&](const ordered_json& v) {
        c.measures_list.clear();
        for (const auto& s : v.get<std::vector<std::string>>())
            c.measures_list.push_back(measures::measure_from_name(s));
    });
    get("weights", [&](const ordered_json& v) {
        c.weights = hie::weight_scheme_from_name(v.get<std::string>());
    });
    get("groups", [&](const ordered_json& v) {
        for (const auto& [name, members] : v.items())
            c.groups.push_back({name, members.get<std::vector<std::string>>()});
    });
    get("hie", [&](const ordered_json& v) { c.run_hie = v.get<bool>(); });
    get("gfa", [&](const ordered_json& v) {
        if (v.is_boolean()) {
            c.run_gfa = v.get<bool>();
            return;
        }
        c.run_gfa = true;
        if (v.contains("direction")) c.direction = gfa::direction_from_name(v.at("direction").get<std::string>());
        if (v.contains("restarts")) c.restarts = v.at("restarts").get<std::size_t>();
        if (v.contains("permutations")) c.permutations = v.at("permutations").get<std::size_t>();
        if (v.contains("min_subset_size")) c.min_subset_size = v.at("min_subset_size").get<std::size_t>();
        if (v.contains("balance")) c.balance = v.at("balance").get<bool>();
    });
    get("out", [&](const ordered_json& v) { c.out_json = v.get<std::string>(); });
    get("markdown", [&](const ordered_json& v) { c.out_markdown = v.get<std::string>(); });
    get("histograms", [&](const ordered_json& v) { c.out_histograms = v.get<std::string>(); });

    static const std::set<std::string> known = {
        "generated", "reference", "generated_baseline", "schema", "delimiter", "drop_incomplete",
        "subsample", "seed", "discretizer", "bins", "bin_fit", "measure", "measures", "weights",
        "groups", "hie", "gfa", "out", "markdown", "histograms"};
    for (const auto& [key, _] : doc.items())
        if (!known.count(key)) problems.push_back("unknown config key '" + key + "'");

    const auto semantic = validation_problems(c);
    problems.insert(problems.end(), semantic.begin(), semantic.end());
    if (!problems.empty()) throw_problems(problems);
    return c;
}

namespace {

dataset::FeatureTable load_input(const EvaluationConfig& c, const std::string& path,
                                 const std::string& source, std::uint64_t subsample_seed) {
    dataset::LoadOptions opts;
    opts.delimiter = c.delimiter;
    opts.drop_incomplete = c.drop_incomplete;
    std::optional<dataset::FeatureSchema> schema;
    if (c.schema_path)
        schema = dataset::schema_from_sidecar(*c.schema_path, dataset::read_header(path, c.delimiter));
    auto table = dataset::load_table(path, schema, source, opts);
    if (c.subsample && *c.subsample != table.rows())
        table = dataset::subsample(table, *c.subsample, subsample_seed);
    return table;
}

std::string table_stem(const std::string& path) {
    return fs::path(path).stem().string();
}

}  // namespace

std::vector<HistogramData> emit_histograms(const dataset::FeatureTable& gen,
                                           const dataset::FeatureTable& ref,
                                           const discretize::BinningSpec& bins,
                                           std::size_t bin_count) {
    if (gen.schema() != ref.schema()) throw Error("emit_histograms: schema mismatch");
    if (bin_count == 0) throw Error("emit_histograms: bin count must be positive");
    std::vector<HistogramData> out;
    for (std::size_t c = 0; c < gen.cols(); ++c) {
        if (gen.schema().kinds[c] != dataset::FeatureKind::continuous) continue;
        if (bins.index_of(gen.schema().names[c]) < 0) continue;
        const auto gv = gen.reals(c);
        const auto rv = ref.reals(c);
        double lo = gv[0], hi = gv[0];
        for (const double v : gv) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (const double v : rv) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        HistogramData h;
        h.feature = gen.schema().names[c];
        const double range = hi - lo;
        const double width = range > 0.0 ? range / static_cast<double>(bin_count) : 1.0;
        h.edges.resize(bin_count + 1);
        for (std::size_t i = 0; i <= bin_count; ++i)
            h.edges[i] = lo + static_cast<double>(i) * width;
        auto densify = [&](std::span<const double> vals) {
            std::vector<double> density(bin_count, 0.0);
            for (const double v : vals) {
                auto b = range > 0.0 ? static_cast<std::size_t>((v - lo) / width) : std::size_t{0};
                if (b >= bin_count) b = bin_count - 1;  // v == hi
                density[b] += 1.0;
            }
            const double norm = static_cast<double>(vals.size()) * width;
            for (double& d : density) d /= norm;
            return density;
        };
        h.density_generated = densify(gv);
        h.density_reference = densify(rv);
        out.push_back(std::move(h));
    }
    return out;
}

void write_histograms_csv(const std::vector<HistogramData>& histograms, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "feature,bin_low,bin_high,density_generated,density_reference\n";
    for (const auto& h : histograms) {
        for (std::size_t b = 0; b + 1 < h.edges.size(); ++b) {
            out << h.feature << ',' << fmt_double(h.edges[b]) << ',' << fmt_double(h.edges[b + 1]) << ','
                << fmt_double(h.density_generated[b]) << ',' << fmt_double(h.density_reference[b]) << '\n';
        }
    }
}

RunReport run(const EvaluationConfig& config) {
    validate(config);
    RunReport report;
    report.config = config;
    report.generated_at = now_utc();

    const std::string baseline_path =
        config.generated_baseline ? *config.generated_baseline : config.reference;
    const std::string baseline_source = table_stem(baseline_path);
    const auto baseline =
        load_input(config, baseline_path, baseline_source, rng::derive_seed(config.seed, 0xba5eULL));

    for (std::size_t g = 0; g < config.generated.size(); ++g) {
        const std::string gen_source = table_stem(config.generated[g]);
        auto gen = load_input(config, config.generated[g], gen_source, rng::derive_seed(config.seed, g + 1));

        ComparisonReport cmp;
        cmp.generated = gen_source;
        cmp.baseline = baseline_source;

        // Balanced comparison: subsample the larger table to the smaller.
        dataset::FeatureTable base_used = baseline;
        if (config.balance && gen.rows() != base_used.rows()) {
            const std::size_t target = std::min(gen.rows(), base_used.rows());
            if (gen.rows() > target)
                gen = dataset::subsample(gen, target, rng::derive_seed(config.seed, 0xba1 + g));
            else
                base_used = dataset::subsample(base_used, target, rng::derive_seed(config.seed, 0xba2 + g));
        }

        if (config.run_hie) {
            for (const auto measure : config.measures_list) {
                hie::HieConfig hc;
                hc.measure = measure;
                hc.method = config.discretizer;
                hc.bins = config.bins;
                hc.bin_fit = config.bin_fit;
                hc.weights = config.weights;
                hc.groups = config.groups;
                hc.seed = config.seed;
                hc.threads = config.threads;
                cmp.hie.push_back(hie::run_hie(gen, base_used, hc));
            }
        }

        const auto pool = dataset::merge_label(gen, base_used);
        discretize::FitOptions fit;
        fit.method = config.discretizer;
        fit.bins = config.bins;
        fit.population = config.bin_fit;
        fit.seed = config.seed;
        fit.threads = config.threads;
        const auto binned = discretize::fit_bins(pool, fit);
        cmp.binning = binned;

        if (config.run_gfa) {
            gfa::ScanParams params;
            params.min_subset_size = config.min_subset_size;
            params.threads = config.threads;
            auto result = gfa::scan(pool, binned, config.direction, config.restarts,
                                    rng::derive_seed(config.seed, 0x5ca + g), params);
            result.p_value = gfa::empirical_p(pool, result.score, binned, config.direction,
                                              config.permutations, config.restarts,
                                              rng::derive_seed(config.seed, 0x9e7 + g), params);
            cmp.gfa = std::move(result);
        }

        cmp.histograms = emit_histograms(gen, base_used, binned);
        report.comparisons.push_back(std::move(cmp));
    }

    if (!config.out_json.empty()) write_file(config.out_json, report.to_json());
    if (!config.out_markdown.empty()) write_file(config.out_markdown, report.to_markdown());
    if (!config.out_histograms.empty()) {
        std::vector<HistogramData> all;
        for (const auto& cmp : report.comparisons)
            all.insert(all.end(), cmp.histograms.begin(), cmp.histograms.end());
        write_histograms_csv(all, config.out_histograms);
    }
    return report;
}

std::string RunReport::to_json() const {
    ordered_json doc;
    doc["tool"] = "mpego";
    doc["version"] = version;
    doc["schema_version"] = 1;
    doc["generated_at"] = generated_at;
    doc["config"] = config_json(config);
    doc["comparisons"] = ordered_json::array();
    for (const auto& cmp : comparisons) {
        ordered_json c;
        c["generated"] = cmp.generated;
        c["baseline"] = cmp.baseline;
        if (!cmp.hie.empty()) {
            c["hie"] = ordered_json::array();
            for (const auto& h : cmp.hie) c["hie"].push_back(ordered_json::parse(h.to_json()));
        }
        if (cmp.gfa) {
            c["gfa"] = ordered_json::parse(cmp.gfa->to_json());
            if (cmp.hie.empty() && !cmp.binning.features.empty())
                c["binning"] = ordered_json::parse(cmp.binning.to_json());
        }
        if (!cmp.histograms.empty()) {
            c["histograms"] = ordered_json::array();
            for (const auto& h : cmp.histograms) {
                ordered_json hh;
                hh["feature"] = h.feature;
                hh["edges"] = h.edges;
                hh["density_generated"] = h.density_generated;
                hh["density_reference"] = h.density_reference;
                c["histograms"].push_back(std::move(hh));
            }
        }
        doc["comparisons"].push_back(std::move(c));
    }
    return doc.dump(2);
}

std::string RunReport::to_markdown() const {
    std::ostringstream md;
    md << "# mpego report\n";
    for (const auto& cmp : comparisons) {
        for (const auto& h : cmp.hie) md << "\n" << h.to_markdown();
        if (cmp.gfa) {
            md << "\n# Generation frequency analysis\n\n";
            md << cmp.gfa->to_markdown(cmp.generated, cmp.baseline);
        }
    }
    return md.str();
}

std::string SweepReport::long_table_csv() const {
    std::ostringstream out;
    out << "variant,generated,feature,fis\n";
    for (const auto& cell : long_table) {
        if (cell.skipped) continue;
        out << cell.variant << ',' << cell.generated << ',' << cell.feature << ','
            << fmt_double(cell.fis) << '\n';
    }
    return out.str();
}

SweepReport ablation_sweep(const EvaluationConfig& config, const SweepAxes& axes) {
    if (!axes.measures && !axes.discretizers && !axes.bin_counts)
        throw ConfigError("ablation_sweep: no axes requested");
    validate(config);

    const auto measure_list = axes.measures
                                  ? (axes.measure_list.empty() ? measures::all_measures() : axes.measure_list)
                                  : config.measures_list;
    const auto discretizer_list =
        axes.discretizers
            ? (axes.discretizer_list.empty()
                   ? std::vector<discretize::Method>{discretize::Method::equal_width,
                                                     discretize::Method::equal_frequency,
                                                     discretize::Method::kmeans}
                   : axes.discretizer_list)
            : std::vector<discretize::Method>{config.discretizer};
    const auto bin_list = axes.bin_counts
                              ? (axes.bin_list.empty() ? std::vector<std::size_t>{3, 5, 10} : axes.bin_list)
                              : std::vector<std::size_t>{config.bins};

    SweepReport sweep;
    for (const auto method : discretizer_list) {
        for (const auto bins : bin_list) {
            EvaluationConfig variant = config;
            variant.run_hie = true;
            variant.run_gfa = false;
            variant.discretizer = method;
            variant.bins = bins;
            variant.measures_list.assign(measure_list.begin(), measure_list.end());
            variant.out_json.clear();
            variant.out_markdown.clear();
            variant.out_histograms.clear();
            RunReport rr = run(variant);
            for (const auto& cmp : rr.comparisons) {
                for (const auto& h : cmp.hie) {
                    std::string label = std::string("measure=") + measures::measure_name(h.config.measure) +
                                        ";discretizer=" + discretize::method_name(method) +
                                        ";bins=" + std::to_string(bins);
                    for (const auto& fr : h.features)
                        sweep.long_table.push_back(
                            SweepCell{label, cmp.generated, fr.name, fr.fis, fr.skipped});
                }
            }
            sweep.runs.push_back(std::move(rr));
        }
    }
    return sweep;
}

}  // namespace mpego::report
