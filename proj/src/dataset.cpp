#include "mpego/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mpego::dataset {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_finite_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) return false;
    return std::isfinite(out);
}

struct RawFile {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawFile read_delimited(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    RawFile raw;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty file: " + path);
    raw.header = split_line(line, delim);
    if (raw.header.empty() || (raw.header.size() == 1 && raw.header[0].empty()))
        throw Error("missing header row: " + path);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        raw.rows.push_back(split_line(line, delim));
    }
    return raw;
}

}  // namespace

const char* kind_name(FeatureKind k) {
    switch (k) {
        case FeatureKind::binary: return "binary";
        case FeatureKind::categorical: return "categorical";
        case FeatureKind::continuous: return "continuous";
    }
    return "?";
}

FeatureKind kind_from_name(const std::string& name) {
    if (name == "binary") return FeatureKind::binary;
    if (name == "categorical") return FeatureKind::categorical;
    if (name == "continuous") return FeatureKind::continuous;
    throw ConfigError("unknown feature kind '" + name + "' (expected binary|categorical|continuous)");
}

FeatureSchema::FeatureSchema(std::vector<std::string> n, std::vector<FeatureKind> k)
    : names(std::move(n)), kinds(std::move(k)) {
    if (names.empty()) throw Error("schema: no columns");
    if (names.size() != kinds.size()) throw Error("schema: names/kinds length mismatch");
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) throw Error("schema: empty column name");
        if (!seen.insert(name).second) throw Error("schema: duplicate column name '" + name + "'");
    }
}

int FeatureSchema::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<std::string> FeatureSchema::diff(const FeatureSchema& a, const FeatureSchema& b) {
    std::vector<std::string> out;
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.size()) {
            out.push_back(b.names[i] + " (missing from first)");
        } else if (i >= b.size()) {
            out.push_back(a.names[i] + " (missing from second)");
        } else if (a.names[i] != b.names[i]) {
            out.push_back(a.names[i] + " vs " + b.names[i]);
        } else if (a.kinds[i] != b.kinds[i]) {
            out.push_back(a.names[i] + " (" + kind_name(a.kinds[i]) + " vs " + kind_name(b.kinds[i]) + ")");
        }
    }
    return out;
}

FeatureTable::FeatureTable(FeatureSchema schema, std::string source)
    : schema_(std::move(schema)), source_(std::move(source)) {
    const std::size_t m = schema_.size();
    reals_.resize(m);
    codes_.resize(m);
    dicts_.resize(m);
    dict_index_.resize(m);
}

void FeatureTable::append_row(const std::vector<std::string>& cells, std::size_t row_label) {
    if (cells.size() != schema_.size())
        throw Error("row " + std::to_string(row_label) + ": expected " + std::to_string(schema_.size()) +
                    " cells, got " + std::to_string(cells.size()));
    // Validate the whole row before mutating any column.
    std::vector<double> parsed(schema_.size(), 0.0);
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        if (schema_.kinds[c] == FeatureKind::continuous &&
            !parse_finite_real(cells[c], parsed[c]))
            throw Error("row " + std::to_string(row_label) + ", column '" + schema_.names[c] +
                        "': cannot parse '" + cells[c] + "' as a finite real");
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
        if (schema_.kinds[c] == FeatureKind::continuous) {
            reals_[c].push_back(parsed[c]);
        } else {
            auto [it, inserted] = dict_index_[c].try_emplace(cells[c], static_cast<std::int32_t>(dicts_[c].size()));
            if (inserted) dicts_[c].push_back(cells[c]);
            codes_[c].push_back(it->second);
        }
    }
    ++rows_;
}

std::span<const double> FeatureTable::reals(std::size_t col) const {
    if (schema_.kinds[col] != FeatureKind::continuous)
        throw Error("column '" + schema_.names[col] + "' is not continuous");
    return reals_[col];
}

std::int32_t FeatureTable::code_at(std::size_t row, std::size_t col) const { return codes_[col][row]; }

const std::string& FeatureTable::token_at(std::size_t row, std::size_t col) const {
    return dicts_[col][static_cast<std::size_t>(codes_[col][row])];
}

const std::vector<std::string>& FeatureTable::dictionary(std::size_t col) const { return dicts_[col]; }

std::string FeatureTable::cell_text(std::size_t row, std::size_t col) const {
    if (schema_.kinds[col] == FeatureKind::continuous) return fmt_double(reals_[col][row]);
    return token_at(row, col);
}

void FeatureTable::save_csv(const std::string& path, char delimiter) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    for (std::size_t c = 0; c < cols(); ++c) {
        if (c) out << delimiter;
        out << schema_.names[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols(); ++c) {
            if (c) out << delimiter;
            out << cell_text(r, c);
        }
        out << '\n';
    }
}

bool FeatureTable::operator==(const FeatureTable& other) const {
    if (schema_ != other.schema_ || rows_ != other.rows_) return false;
    for (std::size_t c = 0; c < cols(); ++c) {
        if (schema_.kinds[c] == FeatureKind::continuous) {
            if (reals_[c] != other.reals_[c]) return false;
        } else {
            for (std::size_t r = 0; r < rows_; ++r)
                if (token_at(r, c) != other.token_at(r, c)) return false;
        }
    }
    return true;
}

FeatureSchema infer_schema(const std::string& path, const LoadOptions& opts) {
    const RawFile raw = read_delimited(path, opts.delimiter);
    if (raw.rows.empty()) throw Error("no data rows: " + path);
    const std::size_t m = raw.header.size();
    std::vector<FeatureKind> kinds(m, FeatureKind::categorical);
    for (std::size_t c = 0; c < m; ++c) {
        bool all_numeric = true;
        std::set<std::string> distinct;
        for (std::size_t r = 0; r < raw.rows.size(); ++r) {
            if (raw.rows[r].size() != m)
                throw Error("row " + std::to_string(r + 1) + ": expected " + std::to_string(m) +
                            " cells, got " + std::to_string(raw.rows[r].size()));
            const std::string& cell = raw.rows[r][c];
            if (cell.empty()) continue;  // missingness handled at load time
            double v;
            if (!parse_finite_real(cell, v)) all_numeric = false;
            distinct.insert(cell);
        }
        if (all_numeric && distinct.size() > static_cast<std::size_t>(opts.continuous_distinct_threshold))
            kinds[c] = FeatureKind::continuous;
        else if (distinct.size() == 2)
            kinds[c] = FeatureKind::binary;
        else
            kinds[c] = FeatureKind::categorical;
    }
    return FeatureSchema(raw.header, kinds);
}

FeatureTable load_table(const std::string& path, const std::optional<FeatureSchema>& schema,
                        const std::string& source, const LoadOptions& opts) {
    const FeatureSchema effective = schema ? *schema : infer_schema(path, opts);
    const RawFile raw = read_delimited(path, opts.delimiter);
    if (raw.header != effective.names) {
        std::string msg = "header of " + path + " does not match schema columns:";
        for (const auto& h : raw.header) msg += " " + h;
        throw Error(msg);
    }
    FeatureTable table(effective, source);
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto& cells = raw.rows[r];
        const bool incomplete = std::any_of(cells.begin(), cells.end(),
                                            [](const std::string& s) { return s.empty(); });
        if (incomplete) {
            if (opts.drop_incomplete) continue;
            std::size_t c = 0;
            while (c < cells.size() && !cells[c].empty()) ++c;
            throw Error("row " + std::to_string(r + 1) + ", column '" +
                        (c < effective.names.size() ? effective.names[c] : "?") +
                        "': missing value (use drop-incomplete to skip such rows)");
        }
        table.append_row(cells, r + 1);
    }
    if (table.rows() == 0) throw Error("no usable data rows: " + path);
    // Binary columns may not carry more than two distinct values.
    for (std::size_t c = 0; c < effective.size(); ++c) {
        if (effective.kinds[c] == FeatureKind::binary && table.dictionary(c).size() > 2)
            throw Error("column '" + effective.names[c] + "' declared binary but has " +
                        std::to_string(table.dictionary(c).size()) + " distinct values");
    }
    return table;
}

FeatureTable subsample(const FeatureTable& table, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw Error("subsample: n must be positive");
    if (n > table.rows())
        throw Error("subsample: n=" + std::to_string(n) + " exceeds row count " + std::to_string(table.rows()));
    rng::Engine eng(seed);
    const auto idx = eng.sample_indices(table.rows(), n);
    FeatureTable out(table.schema(), table.source());
    std::vector<std::string> cells(table.cols());
    for (const std::size_t r : idx) {
        for (std::size_t c = 0; c < table.cols(); ++c) cells[c] = table.cell_text(r, c);
        out.append_row(cells, r + 1);
    }
    return out;
}

LabeledPool merge_label(const FeatureTable& gen, const FeatureTable& ref) {
    if (gen.schema() != ref.schema()) {
        const auto cols = FeatureSchema::diff(gen.schema(), ref.schema());
        std::string msg = "schema mismatch between '" + gen.source() + "' and '" + ref.source() + "':";
        for (const auto& c : cols) msg += " [" + c + "]";
        throw Error(msg);
    }
    FeatureTable merged(gen.schema(), gen.source() + "|" + ref.source());
    std::vector<std::string> cells(gen.cols());
    auto copy_rows = [&](const FeatureTable& t) {
        for (std::size_t r = 0; r < t.rows(); ++r) {
            for (std::size_t c = 0; c < t.cols(); ++c) cells[c] = t.cell_text(r, c);
            merged.append_row(cells, r + 1);
        }
    };
    copy_rows(gen);
    copy_rows(ref);

    LabeledPool pool{std::move(merged), {}, 0.0, gen.rows(), ref.rows(), gen.source(), ref.source()};
    pool.labels.assign(gen.rows(), 1);
    pool.labels.resize(gen.rows() + ref.rows(), 0);
    pool.e_g = expected_fraction(gen.rows(), ref.rows());
    return pool;
}

double expected_fraction(std::size_t n_gen, std::size_t n_ref) {
    if (n_gen == 0 || n_ref == 0) throw Error("expected_fraction: both populations must be non-empty");
    const double total = static_cast<double>(n_gen + n_ref);
    // The smaller fraction is divided out, the larger is its complement, so
    // that e_g(g,r) + e_g(r,g) == 1 holds exactly.
    if (n_gen <= n_ref) return static_cast<double>(n_gen) / total;
    return 1.0 - static_cast<double>(n_ref) / total;
}

FeatureSchema schema_from_sidecar(const std::string& path, const std::vector<std::string>& header_names) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("schema file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("schema file must be a JSON object of column -> kind");
    std::vector<FeatureKind> kinds;
    kinds.reserve(header_names.size());
    for (const auto& name : header_names) {
        if (!doc.contains(name))
            throw ConfigError("schema file " + path + " has no entry for column '" + name + "'");
        kinds.push_back(kind_from_name(doc.at(name).get<std::string>()));
    }
    if (doc.size() != header_names.size())
        throw ConfigError("schema file " + path + " names columns absent from the data header");
    return FeatureSchema(header_names, kinds);
}

std::vector<std::string> read_header(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty file: " + path);
    return split_line(line, delimiter);
}

void save_schema_sidecar(const FeatureSchema& schema, const std::string& path) {
    nlohmann::ordered_json doc;
    for (std::size_t c = 0; c < schema.size(); ++c) doc[schema.names[c]] = kind_name(schema.kinds[c]);
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << doc.dump(2) << '\n';
}

}  // namespace mpego::dataset
