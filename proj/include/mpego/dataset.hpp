#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpego/common.hpp"

namespace mpego::dataset {

enum class FeatureKind { binary, categorical, continuous };

const char* kind_name(FeatureKind k);
FeatureKind kind_from_name(const std::string& name);

/// Ordered, uniquely named feature columns.
struct FeatureSchema {
    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;

    FeatureSchema() = default;
    FeatureSchema(std::vector<std::string> n, std::vector<FeatureKind> k);

    std::size_t size() const { return names.size(); }
    int index_of(const std::string& name) const;  // -1 when absent

    bool operator==(const FeatureSchema&) const = default;

    /// Columns on which the two schemas disagree (name, kind or order).
    static std::vector<std::string> diff(const FeatureSchema& a, const FeatureSchema& b);
};

struct LoadOptions {
    char delimiter = ',';
    bool drop_incomplete = false;  // default: a missing cell is an error
    int continuous_distinct_threshold = 10;
};

/// Immutable sample table: rows of typed cells, column-major storage.
/// Continuous columns hold finite doubles; binary/categorical columns hold
/// dictionary-encoded tokens.
class FeatureTable {
public:
    FeatureTable(FeatureSchema schema, std::string source);

    const FeatureSchema& schema() const { return schema_; }
    const std::string& source() const { return source_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return schema_.size(); }

    /// Append one row of raw cell strings (pre-split by the reader).
    /// `row_label` only decorates error messages.
    void append_row(const std::vector<std::string>& cells, std::size_t row_label);

    std::span<const double> reals(std::size_t col) const;
    std::int32_t code_at(std::size_t row, std::size_t col) const;
    const std::string& token_at(std::size_t row, std::size_t col) const;
    const std::vector<std::string>& dictionary(std::size_t col) const;

    /// Cell rendered back to text (round-trips through save/load).
    std::string cell_text(std::size_t row, std::size_t col) const;

    void save_csv(const std::string& path, char delimiter = ',') const;

    bool operator==(const FeatureTable& other) const;

private:
    FeatureSchema schema_;
    std::string source_;
    std::size_t rows_ = 0;
    std::vector<std::vector<double>> reals_;
    std::vector<std::vector<std::int32_t>> codes_;
    std::vector<std::vector<std::string>> dicts_;
    std::vector<std::unordered_map<std::string, std::int32_t>> dict_index_;
};

/// Merged pool D = G ∪ T with per-row generated/reference labels.
struct LabeledPool {
    FeatureTable table;
    std::vector<std::uint8_t> labels;  // 1 = generated, 0 = reference
    double e_g = 0.0;
    std::size_t n_gen = 0;
    std::size_t n_ref = 0;
    std::string gen_source;
    std::string ref_source;
};

FeatureSchema infer_schema(const std::string& path, const LoadOptions& opts = {});

FeatureTable load_table(const std::string& path, const std::optional<FeatureSchema>& schema,
                        const std::string& source, const LoadOptions& opts = {});

FeatureTable subsample(const FeatureTable& table, std::size_t n, std::uint64_t seed);

LabeledPool merge_label(const FeatureTable& gen, const FeatureTable& ref);

/// Expected generated fraction n_gen/(n_gen+n_ref), computed so the two swap
/// orientations sum to one exactly.
double expected_fraction(std::size_t n_gen, std::size_t n_ref);

/// Schema sidecar: JSON object mapping column name -> kind.
FeatureSchema schema_from_sidecar(const std::string& path, const std::vector<std::string>& header_names);
void save_schema_sidecar(const FeatureSchema& schema, const std::string& path);

/// Header row of a delimited file (column names in file order).
std::vector<std::string> read_header(const std::string& path, char delimiter = ',');

}  // namespace mpego::dataset
