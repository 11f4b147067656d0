#include "cif/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "cif/error.hpp"

namespace cif {

namespace {

using Row = std::vector<std::string>;

std::vector<Row> split_records(std::string_view text, char delimiter) {
    std::vector<Row> rows;
    Row row;
    std::string cell;
    bool in_quotes = false;
    bool cell_started = false;
    auto end_row = [&] {
        row.push_back(std::move(cell));
        cell.clear();
        // A physically empty line carries no cells.
        if (!(row.size() == 1 && row.front().empty() && !cell_started)) rows.push_back(std::move(row));
        row.clear();
        cell_started = false;
    };

    std::size_t i = 0;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            cell_started = true;
        } else if (c == delimiter) {
            row.push_back(std::move(cell));
            cell.clear();
            cell_started = true;
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_row();
        } else if (c == '\n') {
            end_row();
        } else {
            cell.push_back(c);
            cell_started = true;
        }
    }
    if (in_quotes) fail(ErrorKind::InvalidArgument, "unterminated quoted field");
    if (cell_started || !cell.empty() || !row.empty()) end_row();
    return rows;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view cell, char decimal) {
    std::string buf(trim(cell));
    if (buf.empty()) return std::nullopt;
    if (decimal != '.') {
        if (buf.find('.') != std::string::npos) return std::nullopt;
        std::replace(buf.begin(), buf.end(), decimal, '.');
    }
    std::string_view s = buf;
    if (s.front() == '+') s.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
    return kind == FeatureKind::Numeric ? "numeric" : "categorical";
}

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FeatureStats FeatureStats::compute(const std::vector<double>& values) {
    FeatureStats s;
    if (values.empty()) return s;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    s.min = *lo;
    s.max = *hi;
    s.distinct_count = std::set<double>(values.begin(), values.end()).size();
    if (s.distinct_count == 1) {
        s.mean = s.min;
        s.std = 0.0;
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = std::clamp(sum / static_cast<double>(values.size()), s.min, s.max);
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size()));
    return s;
}

Dataset::Dataset(std::string id, std::vector<FeatureColumn> columns,
                 std::vector<std::size_t> dropped_rows)
    : id_(std::move(id)), columns_(std::move(columns)), dropped_rows_(std::move(dropped_rows)) {
    if (!columns_.empty()) {
        const auto& c = columns_.front();
        n_rows_ = c.is_numeric() ? c.numeric.size() : c.categories.size();
    }
}

const FeatureColumn* Dataset::find(std::string_view name) const {
    for (const auto& c : columns_)
        if (c.name == name) return &c;
    return nullptr;
}

const FeatureColumn& Dataset::numeric_column(std::string_view name) const {
    const FeatureColumn* c = find(name);
    if (c == nullptr) fail(ErrorKind::NotFound, "unknown feature '" + std::string(name) + "'");
    if (!c->is_numeric())
        fail(ErrorKind::InvalidArgument, "feature '" + std::string(name) + "' is categorical");
    return *c;
}

std::vector<std::string> Dataset::numeric_features() const {
    std::vector<std::string> names;
    for (const auto& c : columns_)
        if (c.is_numeric()) names.push_back(c.name);
    return names;
}

Dataset load_csv(std::string_view text, const CsvOptions& options) {
    if (options.delimiter == options.decimal)
        fail(ErrorKind::InvalidArgument, "delimiter and decimal separator must differ");
    if (trim(text).empty()) fail(ErrorKind::InvalidArgument, "empty file");

    auto rows = split_records(text, options.delimiter);
    if (rows.empty()) fail(ErrorKind::InvalidArgument, "empty file");

    Row header = std::move(rows.front());
    rows.erase(rows.begin());
    std::unordered_set<std::string> seen;
    for (auto& name : header) {
        name = std::string(trim(name));
        if (name.empty()) fail(ErrorKind::InvalidArgument, "empty header name");
        if (!seen.insert(name).second)
            fail(ErrorKind::InvalidArgument, "duplicate header name '" + name + "'");
    }
    if (rows.empty()) fail(ErrorKind::InvalidArgument, "empty dataset: no data rows");

    const std::size_t width = header.size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            std::ostringstream msg;
            msg << "data row " << r << " has " << rows[r].size() << " fields, expected " << width;
            fail(ErrorKind::InvalidArgument, msg.str());
        }
    }

    // Typing pass.
    std::vector<bool> numeric(width, true);
    std::vector<bool> any_value(width, false);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < width; ++c) {
            if (trim(row[c]).empty()) continue;
            any_value[c] = true;
            if (numeric[c] && !parse_number(row[c], options.decimal)) numeric[c] = false;
        }
    }
    for (std::size_t c = 0; c < width; ++c)
        if (!any_value[c]) numeric[c] = false;
    if (std::none_of(numeric.begin(), numeric.end(), [](bool b) { return b; }))
        fail(ErrorKind::InvalidArgument,
             "no numeric columns: cluster similarity analysis needs at least one numeric feature");

    // Listwise deletion over numeric cells.
    std::vector<std::size_t> dropped;
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        bool missing = false;
        for (std::size_t c = 0; c < width && !missing; ++c)
            missing = numeric[c] && trim(rows[r][c]).empty();
        (missing ? dropped : kept).push_back(r);
    }
    if (kept.empty()) fail(ErrorKind::InvalidArgument, "empty dataset: every row has a missing numeric value");

    std::vector<FeatureColumn> columns(width);
    for (std::size_t c = 0; c < width; ++c) {
        auto& col = columns[c];
        col.name = header[c];
        col.kind = numeric[c] ? FeatureKind::Numeric : FeatureKind::Categorical;
        for (std::size_t r : kept) {
            if (numeric[c])
                col.numeric.push_back(*parse_number(rows[r][c], options.decimal));
            else
                col.categories.emplace_back(trim(rows[r][c]));
        }
        if (numeric[c]) col.stats = FeatureStats::compute(col.numeric);
    }
    return Dataset("ds-" + content_hash(text), std::move(columns), std::move(dropped));
}

Dataset load_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::NotFound, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_csv(buf.str(), options);
}

std::string to_csv(const Dataset& dataset) {
    std::string out;
    const auto& cols = dataset.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out.push_back(',');
        out += quote_if_needed(cols[c].name);
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out.push_back(',');
            out += cols[c].is_numeric() ? format_number(cols[c].numeric[r])
                                        : quote_if_needed(cols[c].categories[r]);
        }
        out.push_back('\n');
    }
    return out;
}

Histogram histogram(const Dataset& dataset, std::string_view feature, std::size_t bins) {
    const auto& col = dataset.numeric_column(feature);
    if (bins == 0) fail(ErrorKind::InvalidArgument, "bin count must be positive");

    double lo = col.stats->min;
    double hi = col.stats->max;
    if (hi == lo) hi = lo + 1.0;

    Histogram h;
    h.feature = col.name;
    h.bin_count = bins;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);

    for (double v : col.numeric) {
        auto idx = static_cast<std::size_t>(
            std::clamp(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)), 0.0,
                       static_cast<double>(bins - 1)));
        // Snap to the edges actually reported: [lo, hi) except the last bin.
        while (idx > 0 && v < h.edges[idx]) --idx;
        while (idx + 1 < bins && v >= h.edges[idx + 1]) ++idx;
        ++h.counts[idx];
    }
    return h;
}

std::vector<double> column_minmax(const Dataset& dataset, std::string_view feature) {
    const auto& col = dataset.numeric_column(feature);
    const double lo = col.stats->min;
    const double span = col.stats->max - lo;
    std::vector<double> out(col.numeric.size(), 0.5);
    if (span > 0.0)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (col.numeric[i] - lo) / span;
    return out;
}

std::vector<double> zscore(const std::vector<double>& values) {
    const FeatureStats s = FeatureStats::compute(values);
    std::vector<double> out(values.size(), 0.0);
    if (s.std > 0.0)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (values[i] - s.mean) / s.std;
    return out;
}

std::vector<double> zscore(const Dataset& dataset, std::string_view feature) {
    return zscore(dataset.numeric_column(feature).numeric);
}

}  // namespace cif
