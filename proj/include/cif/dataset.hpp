#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cif {

enum class FeatureKind { Numeric, Categorical };

std::string_view to_string(FeatureKind kind);

struct FeatureStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double std = 0.0;  // population (ddof = 0)
    std::size_t distinct_count = 0;

    static FeatureStats compute(const std::vector<double>& values);
};

struct FeatureColumn {
    std::string name;
    FeatureKind kind = FeatureKind::Numeric;
    std::vector<double> numeric;          // populated when kind == Numeric
    std::vector<std::string> categories;  // populated when kind == Categorical
    std::optional<FeatureStats> stats;    // numeric only

    bool is_numeric() const { return kind == FeatureKind::Numeric; }
};

struct Histogram {
    std::string feature;
    std::size_t bin_count = 0;
    std::vector<double> edges;         // bin_count + 1 ascending values
    std::vector<std::size_t> counts;   // bin_count entries
};

struct CsvOptions {
    char delimiter = ',';
    char decimal = '.';
};

// Immutable parsed table. Row indices 0..n_rows-1 are dense and stable; they
// form the universe over which cluster memberships are compared.
class Dataset {
public:
    Dataset(std::string id, std::vector<FeatureColumn> columns,
            std::vector<std::size_t> dropped_rows);

    const std::string& id() const { return id_; }
    std::size_t n_rows() const { return n_rows_; }
    const std::vector<FeatureColumn>& columns() const { return columns_; }
    const std::vector<std::size_t>& dropped_rows() const { return dropped_rows_; }

    // nullptr when absent
    const FeatureColumn* find(std::string_view name) const;

    // Throws NotFound for an unknown name, InvalidArgument for a categorical column.
    const FeatureColumn& numeric_column(std::string_view name) const;

    // Names of numeric columns in file order.
    std::vector<std::string> numeric_features() const;

private:
    std::string id_;
    std::size_t n_rows_ = 0;
    std::vector<FeatureColumn> columns_;
    std::vector<std::size_t> dropped_rows_;
};

// Parses CSV text. The first row is the header. A column is numeric iff every
// non-empty cell parses as a finite number; rows with any missing numeric
// cell are dropped and reported in dropped_rows (original 0-based data-row
// indices). The dataset id is derived from the content.
Dataset load_csv(std::string_view text, const CsvOptions& options = {});
Dataset load_csv_file(const std::string& path, const CsvOptions& options = {});

// Canonical export: `,` delimiter, `.` decimal, 12 significant digits.
std::string to_csv(const Dataset& dataset);

Histogram histogram(const Dataset& dataset, std::string_view feature, std::size_t bins);

// (v - min) / (max - min); a constant column maps to 0.5.
std::vector<double> column_minmax(const Dataset& dataset, std::string_view feature);

// (v - mean) / std with population std; a constant column maps to 0.
std::vector<double> zscore(const Dataset& dataset, std::string_view feature);
std::vector<double> zscore(const std::vector<double>& values);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace cif
