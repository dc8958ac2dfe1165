#pragma once

// File formats: front and sweep tables (CSV/JSON), selection reports, basis
// export, run logs, SPEA2 config files and the front scatter SVG.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dataset.hpp"
#include "dominance.hpp"
#include "error.hpp"
#include "pca_core.hpp"
#include "selection.hpp"
#include "spea2.hpp"

namespace mofpca {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Shortest-exact decimal text for a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// One fully described selection: objectives plus per-group errors.
struct ReportRow {
  int r = 0;
  std::string method;  // empty for front rows
  ComponentSelection selection;
  ObjectiveVector objectives;
  Residuals residuals;
  double recon_error_per_sample = 0.0;
  std::optional<double> runtime_ms;

  static ReportRow describe(const PrincipalBasis& basis, const ComponentSelection& sel, std::string method = {}) {
    ReportRow row;
    row.r = sel.size();
    row.method = std::move(method);
    row.selection = sel;
    row.objectives = evaluate(basis, sel);
    row.residuals = mofpca::residuals(basis, sel);
    row.recon_error_per_sample = row.objectives.recon_error / static_cast<double>(basis.n());
    return row;
  }
};

inline std::vector<int> to_one_based(const ComponentSelection& sel) {
  std::vector<int> v = sel.indices();
  for (int& i : v) ++i;
  return v;
}

inline json row_to_json(const ReportRow& row) {
  json j;
  j["r"] = row.r;
  if (!row.method.empty()) j["method"] = row.method;
  j["indices"] = row.selection.indices();
  j["indices_1based"] = to_one_based(row.selection);
  j["recon_error"] = row.objectives.recon_error;
  j["recon_error_per_sample"] = row.recon_error_per_sample;
  j["fairness"] = row.objectives.fairness;
  j["group_a_error_raw"] = row.residuals.group_a;
  j["group_b_error_raw"] = row.residuals.group_b;
  j["group_a_error_per_sample"] = row.residuals.group_a_per_sample;
  j["group_b_error_per_sample"] = row.residuals.group_b_per_sample;
  if (row.runtime_ms) j["runtime_ms"] = *row.runtime_ms;
  return j;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- fronts

/// Front CSV. group_a_error / group_b_error are per-sample group residuals,
/// the two quantities whose squared difference is the fairness measure.
inline std::string front_to_csv(const std::vector<ReportRow>& rows) {
  std::string s = "r,indices,recon_error,recon_error_per_sample,fairness,group_a_error,group_b_error,indices_1based\n";
  for (const auto& row : rows) {
    s += std::to_string(row.r) + ',' + row.selection.to_string(0) + ',' + format_double(row.objectives.recon_error) +
         ',' + format_double(row.recon_error_per_sample) + ',' + format_double(row.objectives.fairness) + ',' +
         format_double(row.residuals.group_a_per_sample) + ',' + format_double(row.residuals.group_b_per_sample) +
         ',' + row.selection.to_string(1) + '\n';
  }
  return s;
}

inline std::string front_to_json(const std::vector<ReportRow>& rows) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["records"] = json::array();
  for (const auto& row : rows) j["records"].push_back(row_to_json(row));
  return j.dump(2) + '\n';
}

inline std::vector<ReportRow> describe_front(const PrincipalBasis& basis, const std::vector<FrontRecord>& front) {
  std::vector<ReportRow> rows;
  rows.reserve(front.size());
  for (const auto& rec : front) rows.push_back(ReportRow::describe(basis, rec.selection));
  return rows;
}

// ---------------------------------------------------------------- sweeps

inline std::string sweep_to_csv(const std::vector<ReportRow>& rows) {
  std::string s =
      "r,method,recon_error,recon_error_per_sample,fairness,group_a_error_per_sample,group_b_error_per_sample,"
      "selected_indices,selected_indices_1based,runtime_ms\n";
  for (const auto& row : rows) {
    s += std::to_string(row.r) + ',' + row.method + ',' + format_double(row.objectives.recon_error) + ',' +
         format_double(row.recon_error_per_sample) + ',' + format_double(row.objectives.fairness) + ',' +
         format_double(row.residuals.group_a_per_sample) + ',' + format_double(row.residuals.group_b_per_sample) +
         ',' + row.selection.to_string(0) + ',' + row.selection.to_string(1) + ',' +
         (row.runtime_ms ? format_double(*row.runtime_ms) : std::string()) + '\n';
  }
  return s;
}

inline std::string sweep_to_json(const std::vector<ReportRow>& rows) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["rows"] = json::array();
  for (const auto& row : rows) j["rows"].push_back(row_to_json(row));
  return j.dump(2) + '\n';
}

// ---------------------------------------------------------------- reading tables back

/// A row of a front or sweep file as read from disk.
struct TableRow {
  int r = 0;
  std::string method;
  ComponentSelection selection;
  std::map<std::string, double> values;  // numeric columns by name
};

namespace detail {

inline ComponentSelection parse_indices(const std::string& text) {
  std::istringstream ss(text);
  std::vector<int> idx;
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      idx.push_back(std::stoi(tok, &used));
      if (used != tok.size()) throw InputError("bad index '" + tok + "'");
    } catch (const std::logic_error&) {
      throw InputError("bad index '" + tok + "'");
    }
  }
  return ComponentSelection(std::move(idx));
}

}  // namespace detail

inline std::vector<TableRow> parse_table_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("table file is empty");
  const auto header = detail::split_csv_line(line);
  const auto col = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* name : names)
      for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name) return c;
    return std::nullopt;
  };
  const auto idx_col = col({"indices", "selected_indices"});
  const auto r_col = col({"r"});
  if (!idx_col || !r_col) throw InputError("table file lacks 'r' or index columns");
  const auto method_col = col({"method"});

  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) throw InputError("malformed table row: " + line);
    TableRow row;
    const auto r = detail::parse_double(cells[*r_col]);
    if (!r) throw InputError("bad r value '" + cells[*r_col] + "'");
    row.r = static_cast<int>(*r);
    row.selection = detail::parse_indices(cells[*idx_col]);
    if (method_col) row.method = cells[*method_col];
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *idx_col || c == *r_col || (method_col && c == *method_col)) continue;
      if (const auto v = detail::parse_double(cells[c])) row.values[header[c]] = *v;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<TableRow> parse_table_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  const json* list = j.contains("records") ? &j["records"] : j.contains("rows") ? &j["rows"] : nullptr;
  if (list == nullptr || !list->is_array()) throw InputError("JSON table has no 'records' or 'rows' array");
  std::vector<TableRow> rows;
  try {
    for (const auto& item : *list) {
      TableRow row;
      row.r = item.at("r").get<int>();
      row.selection = ComponentSelection(item.at("indices").get<std::vector<int>>());
      if (item.contains("method")) row.method = item["method"].get<std::string>();
      for (const auto& [key, value] : item.items())
        if (value.is_number() && key != "r") row.values[key] = value.get<double>();
      rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON table: ") + e.what());
  }
  return rows;
}

inline std::vector<TableRow> read_table(const std::string& path) {
  const std::string text = read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) return parse_table_json(text);
  return parse_table_csv(text);
}

// ---------------------------------------------------------------- selection report

inline json selection_report(const PrincipalBasis& basis, const std::vector<FrontRecord>& front,
                             const SelectionWeights& weights, const FrontRecord& chosen) {
  const auto scored = [&](const ComponentSelection& sel) {
    json row = row_to_json(ReportRow::describe(basis, sel));
    row["weighted_score"] = weighted_score(evaluate(basis, sel), weights);
    return row;
  };
  json j;
  j["schema_version"] = kSchemaVersion;
  j["r"] = chosen.selection.size();
  j["lambda"] = weights.lambda;
  j["m_re"] = weights.m_re;
  j["m_fm"] = weights.m_fm;
  j["chosen"] = scored(chosen.selection);
  j["classical"] = scored(ComponentSelection::leading(chosen.selection.size()));
  j["front"] = json::array();
  for (const auto& rec : front) j["front"].push_back(scored(rec.selection));
  return j;
}

// ---------------------------------------------------------------- basis export

inline json basis_to_json(const PrincipalBasis& basis, bool include_vectors) {
  const auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = basis.dim();
  j["n_a"] = basis.n_a;
  j["n_b"] = basis.n_b;
  j["total_energy"] = basis.total_energy;
  j["group_a_total"] = basis.group_a_total;
  j["group_b_total"] = basis.group_b_total;
  j["eigenvalues"] = vec(basis.eigenvalues);
  j["group_a_energy"] = vec(basis.group_a_energy);
  j["group_b_energy"] = vec(basis.group_b_energy);
  if (include_vectors) {
    json cols = json::array();
    for (Eigen::Index c = 0; c < basis.u.cols(); ++c) cols.push_back(vec(basis.u.col(c)));
    j["u_columns"] = std::move(cols);
  }
  return j;
}

inline PrincipalBasis basis_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) throw InputError("unsupported basis schema version");
    const auto vec = [](const json& a) {
      const auto v = a.get<std::vector<double>>();
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    PrincipalBasis b;
    const int d = j.at("d").get<int>();
    b.n_a = j.at("n_a").get<std::size_t>();
    b.n_b = j.at("n_b").get<std::size_t>();
    b.total_energy = j.at("total_energy").get<double>();
    b.group_a_total = j.at("group_a_total").get<double>();
    b.group_b_total = j.at("group_b_total").get<double>();
    b.eigenvalues = vec(j.at("eigenvalues"));
    b.group_a_energy = vec(j.at("group_a_energy"));
    b.group_b_energy = vec(j.at("group_b_energy"));
    if (b.eigenvalues.size() != d || b.group_a_energy.size() != d || b.group_b_energy.size() != d)
      throw InputError("basis vectors do not match d");
    if (j.contains("u_columns")) {
      const auto& cols = j["u_columns"];
      if (static_cast<int>(cols.size()) != d) throw InputError("basis u_columns do not match d");
      b.u.resize(d, d);
      for (int c = 0; c < d; ++c) {
        const Eigen::VectorXd col = vec(cols[static_cast<std::size_t>(c)]);
        if (col.size() != d) throw InputError("basis column has the wrong length");
        b.u.col(c) = col;
      }
    }
    return b;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed basis JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- run log

inline std::string run_log_to_csv(const std::vector<GenerationLog>& log) {
  std::string s = "generation,archive_size,best_recon_error,best_fairness,spread\n";
  for (const auto& e : log)
    s += std::to_string(e.generation) + ',' + std::to_string(e.archive_size) + ',' +
         format_double(e.best_recon_error) + ',' + format_double(e.best_fairness) + ',' + format_double(e.spread) +
         '\n';
  return s;
}

// ---------------------------------------------------------------- config file

struct ConfigOverrides {
  std::optional<int> population_size;
  std::optional<int> archive_size;
  std::optional<int> generations;
  std::optional<double> crossover_rate;
  std::optional<std::uint64_t> seed;  // resolved by the caller, not by apply()
  std::optional<int> r;
  std::optional<int> mutation_swaps;

  void apply(Spea2Config& cfg) const {
    if (population_size) cfg.population_size = *population_size;
    if (archive_size) cfg.archive_size = *archive_size;
    if (generations) cfg.generations = *generations;
    if (crossover_rate) cfg.crossover_rate = *crossover_rate;
    if (mutation_swaps) cfg.mutation_swaps = *mutation_swaps;
  }
};

/// Reads either a JSON object or `key = value` lines (# comments allowed).
inline ConfigOverrides parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) kv[key] = value.is_string() ? value.get<std::string>() : value.dump();
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (detail::trim(line).empty()) continue;
      const auto eq = line.find_first_of("=:");
      if (eq == std::string::npos) throw ConfigError("config line without '=': " + line);
      kv[std::string(detail::trim(line.substr(0, eq)))] = detail::unquote(line.substr(eq + 1));
    }
  }

  ConfigOverrides o;
  const auto number = [](const std::string& key, const std::string& v) {
    const auto d = detail::parse_double(v);
    if (!d) throw ConfigError("config key '" + key + "' is not a number: " + v);
    return *d;
  };
  const auto integer = [&](const std::string& key, const std::string& v) {
    const double d = number(key, v);
    if (d != std::floor(d) || std::abs(d) > 2e9) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<int>(d);
  };
  for (const auto& [key, value] : kv) {
    if (key == "population_size") o.population_size = integer(key, value);
    else if (key == "archive_size") o.archive_size = integer(key, value);
    else if (key == "generations") o.generations = integer(key, value);
    else if (key == "crossover_rate") o.crossover_rate = number(key, value);
    else if (key == "r") o.r = integer(key, value);
    else if (key == "mutation_swaps") o.mutation_swaps = integer(key, value);
    else if (key == "seed") {
      try {
        std::size_t used = 0;
        if (value.empty() || value[0] < '0' || value[0] > '9') throw std::invalid_argument("seed");
        o.seed = std::stoull(value, &used);
        if (used != value.size()) throw ConfigError("config key 'seed' must be an unsigned integer");
      } catch (const std::logic_error&) {
        throw ConfigError("config key 'seed' must be an unsigned integer");
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return o;
}

// ---------------------------------------------------------------- SVG

/// Static scatter of a front in (recon_error, fairness) space.
inline std::string front_to_svg(const std::vector<ReportRow>& rows, const ComponentSelection* highlight) {
  constexpr double width = 640, height = 480, margin = 60;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!rows.empty()) {
    x0 = x1 = rows.front().objectives.recon_error;
    y0 = y1 = rows.front().objectives.fairness;
    for (const auto& r : rows) {
      x0 = std::min(x0, r.objectives.recon_error), x1 = std::max(x1, r.objectives.recon_error);
      y0 = std::min(y0, r.objectives.fairness), y1 = std::max(y1, r.objectives.fairness);
    }
  }
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
  const auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  s += "<line x1=\"60\" y1=\"420\" x2=\"580\" y2=\"420\" stroke=\"black\"/>\n";
  s += "<line x1=\"60\" y1=\"60\" x2=\"60\" y2=\"420\" stroke=\"black\"/>\n";
  s += "<text x=\"320\" y=\"460\" text-anchor=\"middle\" font-size=\"14\">reconstruction error</text>\n";
  s += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 18 240)\">fairness</text>\n";
  s += "<text x=\"60\" y=\"438\" font-size=\"11\">" + num(x0) + "</text>\n";
  s += "<text x=\"580\" y=\"438\" text-anchor=\"end\" font-size=\"11\">" + num(x1) + "</text>\n";
  s += "<text x=\"56\" y=\"420\" text-anchor=\"end\" font-size=\"11\">" + num(y0) + "</text>\n";
  s += "<text x=\"56\" y=\"64\" text-anchor=\"end\" font-size=\"11\">" + num(y1) + "</text>\n";
  for (const auto& r : rows) {
    const bool hit = highlight != nullptr && r.selection == *highlight;
    s += "<circle cx=\"" + num(px(r.objectives.recon_error)) + "\" cy=\"" + num(py(r.objectives.fairness)) +
         "\" r=\"" + (hit ? "7" : "4") + "\" fill=\"" + (hit ? "crimson" : "steelblue") + "\"><title>" +
         r.selection.to_string(1) + "</title></circle>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace mofpca
