#pragma once

// Tabular input: CSV loading, two-group partition, column scaling.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace mofpca {

enum class ScalingMode { zscore, pixel, none };

inline std::string to_string(ScalingMode mode) {
  switch (mode) {
    case ScalingMode::zscore: return "zscore";
    case ScalingMode::pixel: return "pixel";
    case ScalingMode::none: return "none";
  }
  return "none";
}

inline ScalingMode parse_scaling_mode(std::string_view text) {
  if (text == "zscore") return ScalingMode::zscore;
  if (text == "pixel") return ScalingMode::pixel;
  if (text == "none") return ScalingMode::none;
  throw ConfigError("unknown scaling mode '" + std::string(text) + "'");
}

struct RawTable {
  Eigen::MatrixXd values;  // n x d
  std::vector<std::string> column_names;

  [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
};

/// Row indices of the two sensitive groups. Both lists are ascending and
/// together cover 0..n-1 exactly once.
struct GroupPartition {
  std::vector<std::size_t> group_a_rows;
  std::vector<std::size_t> group_b_rows;

  [[nodiscard]] std::size_t size() const { return group_a_rows.size() + group_b_rows.size(); }

  static GroupPartition from_mask(const std::vector<bool>& in_group_a) {
    GroupPartition p;
    for (std::size_t i = 0; i < in_group_a.size(); ++i)
      (in_group_a[i] ? p.group_a_rows : p.group_b_rows).push_back(i);
    return p;
  }

  GroupPartition swapped() const { return {group_b_rows, group_a_rows}; }

  void validate(std::size_t n) const {
    if (group_a_rows.empty() || group_b_rows.empty())
      throw InputError("both sensitive groups must be non-empty");
    std::vector<char> seen(n, 0);
    for (const auto* rows : {&group_a_rows, &group_b_rows}) {
      for (std::size_t r : *rows) {
        if (r >= n) throw InputError("group row index out of range");
        if (seen[r]++) throw InputError("group partition rows overlap");
      }
    }
    if (size() != n) throw InputError("group partition does not cover every row");
  }
};

struct CsvOptions {
  std::string sensitive_column;
  // One value: the sensitive column must be binary and rows equal to it form
  // group A. Several values: explicit binarization, rows matching any of them
  // form group A and every other row forms group B.
  std::vector<std::string> group_a_values;
  bool keep_sensitive = false;  // also keep the sensitive column as a feature
  std::vector<std::string> drop_columns;
};

struct LoadedTable {
  RawTable table;
  GroupPartition groups;
  std::vector<std::string> sensitive_values;  // per row, as read
};

struct StandardizedDataset {
  Eigen::MatrixXd x;  // n x d
  GroupPartition groups;
  ScalingMode scaling_mode = ScalingMode::none;
  std::vector<std::string> column_names;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(x.rows()); }
  [[nodiscard]] std::size_t d() const { return static_cast<std::size_t>(x.cols()); }
  [[nodiscard]] Eigen::MatrixXd group_a() const { return x(groups.group_a_rows, Eigen::all); }
  [[nodiscard]] Eigen::MatrixXd group_b() const { return x(groups.group_b_rows, Eigen::all); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      cell.push_back(c);
    } else if (c == ',' && !quoted) {
      cells.push_back(unquote(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(unquote(cell));
  return cells;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Parses a header + rows CSV into a numeric feature table and an A/B
/// partition taken from the sensitive column.
inline LoadedTable parse_csv(std::istream& in, const CsvOptions& options) {
  if (options.sensitive_column.empty()) throw InputError("no sensitive column given");
  if (options.group_a_values.empty()) throw InputError("no group A value given");

  std::string line;
  if (!std::getline(in, line)) throw InputError("CSV input is empty (no header row)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = detail::split_csv_line(line);

  std::optional<std::size_t> sensitive;
  std::vector<std::size_t> feature_cols;
  std::set<std::string> dropped(options.drop_columns.begin(), options.drop_columns.end());
  for (std::size_t c = 0; c < header.size(); ++c) {
    const bool is_sensitive = header[c] == options.sensitive_column;
    if (is_sensitive) sensitive = c;
    if (dropped.count(header[c]) != 0) {
      dropped.erase(header[c]);
      continue;
    }
    if (!is_sensitive || options.keep_sensitive) feature_cols.push_back(c);
  }
  if (!sensitive) throw InputError("sensitive column '" + options.sensitive_column + "' not found");
  if (!dropped.empty()) throw InputError("column to drop '" + *dropped.begin() + "' not found");
  if (feature_cols.empty()) throw InputError("no feature columns left");

  std::vector<std::vector<double>> rows;
  LoadedTable out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (std::size_t c : feature_cols) {
      const auto v = detail::parse_double(cells[c]);
      if (!v)
        throw InputError("line " + std::to_string(line_no) + ", column '" + header[c] +
                         "': non-numeric or missing value '" + cells[c] + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
    out.sensitive_values.push_back(cells[*sensitive]);
  }

  const std::size_t n = rows.size();
  if (n < 2) throw InputError("need at least 2 data rows, got " + std::to_string(n));

  const std::set<std::string> distinct(out.sensitive_values.begin(), out.sensitive_values.end());
  if (options.group_a_values.size() == 1 && distinct.size() != 2)
    throw InputError("sensitive attribute not binary: column '" + options.sensitive_column +
                     "' has " + std::to_string(distinct.size()) + " distinct values");

  const std::set<std::string> group_a(options.group_a_values.begin(), options.group_a_values.end());
  std::vector<bool> mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = group_a.count(out.sensitive_values[i]) != 0;
  out.groups = GroupPartition::from_mask(mask);
  if (out.groups.group_a_rows.empty()) throw InputError("empty group: no row matches the group A value");
  if (out.groups.group_b_rows.empty()) throw InputError("empty group: every row matches the group A value");

  out.table.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_cols.size()));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      out.table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  for (std::size_t c : feature_cols) out.table.column_names.push_back(header[c]);
  return out;
}

inline LoadedTable load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return parse_csv(in, options);
}

/// Scales the table. zscore uses the mean and population standard deviation
/// of each column over all rows (both groups together); constant columns
/// become zero and are reported in `warnings`. pixel multiplies by 1/255.
inline StandardizedDataset standardize(const RawTable& table, GroupPartition groups, ScalingMode mode) {
  const auto n = table.values.rows();
  if (n < 2) throw InputError("standardize needs at least 2 rows");
  if (!table.values.allFinite()) throw InputError("table contains non-finite values");
  groups.validate(static_cast<std::size_t>(n));

  StandardizedDataset ds;
  ds.groups = std::move(groups);
  ds.scaling_mode = mode;
  ds.column_names = table.column_names;
  ds.x = table.values;

  switch (mode) {
    case ScalingMode::none:
      break;
    case ScalingMode::pixel:
      ds.x *= 1.0 / 255.0;
      break;
    case ScalingMode::zscore:
      for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
        auto col = ds.x.col(j);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
        if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
          col.setZero();
          const std::string name = static_cast<std::size_t>(j) < ds.column_names.size()
                                       ? ds.column_names[static_cast<std::size_t>(j)]
                                       : std::to_string(j);
          ds.warnings.push_back("constant column '" + name + "' set to zero");
        } else {
          col /= sd;
        }
      }
      break;
  }
  return ds;
}

}  // namespace mofpca
