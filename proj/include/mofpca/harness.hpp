#pragma once

// End-to-end commands behind the `mofpca` tool: classical PCA report,
// front search (SPEA2 or exhaustive) with single-solution selection, per-r
// sweeps, selection from an existing front file, and re-verification of
// emitted tables.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dataset.hpp"
#include "dominance.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "pca_core.hpp"
#include "rng.hpp"
#include "selection.hpp"
#include "spea2.hpp"

namespace mofpca::harness {

enum class Format { csv, json };

struct DataOptions {
  std::string input;
  std::string sensitive;
  std::vector<std::string> group_a;
  bool keep_sensitive = false;
  std::vector<std::string> drop;
  ScalingMode scaling = ScalingMode::zscore;
};

struct Prepared {
  StandardizedDataset dataset;
  PrincipalBasis basis;
};

inline Prepared prepare(const DataOptions& opt) {
  CsvOptions csv;
  csv.sensitive_column = opt.sensitive;
  csv.group_a_values = opt.group_a;
  csv.keep_sensitive = opt.keep_sensitive;
  csv.drop_columns = opt.drop;
  LoadedTable loaded = load_csv(opt.input, csv);
  Prepared p;
  p.dataset = standardize(loaded.table, std::move(loaded.groups), opt.scaling);
  p.basis = compute_basis(p.dataset);
  return p;
}

struct SearchOptions {
  std::uint64_t seed = 0;
  std::optional<std::string> config_path;
  ConfigOverrides overrides;  // from command-line flags; win over the config file
  bool exhaustive = false;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::optional<DatasetKind> kind;
  std::size_t workers = 1;
};

inline DatasetKind kind_for(const SearchOptions& opt, ScalingMode scaling) {
  if (opt.kind) return *opt.kind;
  return scaling == ScalingMode::pixel ? DatasetKind::image : DatasetKind::tabular;
}

inline ConfigOverrides file_overrides(const SearchOptions& opt) {
  if (!opt.config_path) return {};
  std::string text;
  try {
    text = read_text(*opt.config_path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

inline Spea2Config make_config(const PrincipalBasis& basis, int r, std::uint64_t seed, DatasetKind kind,
                               const SearchOptions& opt) {
  Spea2Config cfg = default_config(basis.dim(), r, kind);
  cfg.seed = seed;
  file_overrides(opt).apply(cfg);
  opt.overrides.apply(cfg);
  cfg.r = r;
  cfg.validate();
  return cfg;
}

struct SearchOutcome {
  std::vector<FrontRecord> front;
  SelectionWeights weights;
  FrontRecord chosen;
  std::optional<Spea2Result> spea2;  // empty for exhaustive runs
  double runtime_ms = 0.0;
};

inline SearchOutcome search(const PrincipalBasis& basis, int r, std::uint64_t seed, DatasetKind kind,
                            const SearchOptions& opt) {
  if (r < 1 || r > basis.dim())
    throw InputError("r = " + std::to_string(r) + " outside 1.." + std::to_string(basis.dim()));
  const auto start = std::chrono::steady_clock::now();
  SearchOutcome out;
  if (opt.exhaustive) {
    out.front = brute_force_front(basis, r, opt.cap, opt.workers);
  } else {
    out.spea2 = run(basis, make_config(basis, r, seed, kind, opt), opt.workers);
    out.front = out.spea2->front;
  }
  out.weights = compute_lambda(basis);
  out.chosen = select_solution(out.front, out.weights);
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// One pca row and one mofpca-selected row per r (plus a brute-force-selected
/// row when `exhaustive` is set and C(d, r) is within the cap). Each r draws
/// its SPEA2 seed from its own stream of `seed`, so rows do not depend on the
/// order or parallelism of the sweep.
inline std::vector<ReportRow> sweep(const PrincipalBasis& basis, int r_min, int r_max, DatasetKind kind,
                                    const SearchOptions& opt, bool timing) {
  if (r_min < 1 || r_max < r_min || r_max > basis.dim())
    throw InputError("sweep range " + std::to_string(r_min) + ".." + std::to_string(r_max) +
                     " invalid for d = " + std::to_string(basis.dim()));
  const std::size_t count = static_cast<std::size_t>(r_max - r_min + 1);
  std::vector<std::vector<ReportRow>> per_r(count);
  SearchOptions inner = opt;
  inner.workers = 1;
  inner.exhaustive = false;
  parallel_for(count, opt.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int r = r_min + static_cast<int>(i);
      auto& rows = per_r[i];
      auto t0 = std::chrono::steady_clock::now();
      rows.push_back(ReportRow::describe(basis, ComponentSelection::leading(r), "pca"));
      auto ms = [](auto since) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
      };
      if (timing) rows.back().runtime_ms = ms(t0);

      const std::uint64_t seed = Rng::stream(opt.seed, static_cast<std::uint64_t>(r)).next();
      const SearchOutcome found = search(basis, r, seed, kind, inner);
      rows.push_back(ReportRow::describe(basis, found.chosen.selection, "mofpca-selected"));
      if (timing) rows.back().runtime_ms = found.runtime_ms;

      if (opt.exhaustive && binomial(basis.dim(), r) <= opt.cap) {
        SearchOptions ex = inner;
        ex.exhaustive = true;
        const SearchOutcome exact = search(basis, r, seed, kind, ex);
        rows.push_back(ReportRow::describe(basis, exact.chosen.selection, "brute-force-selected"));
        if (timing) rows.back().runtime_ms = exact.runtime_ms;
      }
    }
  });
  std::vector<ReportRow> out;
  for (auto& rows : per_r) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

struct VerifyResult {
  std::size_t rows = 0;
  std::vector<std::string> problems;
  [[nodiscard]] bool ok() const { return problems.empty(); }
};

/// Re-evaluates every row of a front or sweep table against the basis.
inline VerifyResult verify_table(const PrincipalBasis& basis, const std::vector<TableRow>& rows,
                                 double rel_tol = 1e-9) {
  VerifyResult result;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const TableRow& row = rows[i];
    ++result.rows;
    const std::string where = "row " + std::to_string(i + 1) + " (" + row.selection.to_string(0) + "): ";
    try {
      row.selection.validate(basis.dim());
    } catch (const InputError& e) {
      result.problems.push_back(where + e.what());
      continue;
    }
    if (row.selection.size() != row.r) result.problems.push_back(where + "r does not match index count");
    if (row.method == "pca" && row.selection != ComponentSelection::leading(row.r))
      result.problems.push_back(where + "pca row does not use the leading components");
    const ReportRow expect = ReportRow::describe(basis, row.selection);
    const std::pair<const char*, double> checks[] = {
        {"recon_error", expect.objectives.recon_error},
        {"recon_error_per_sample", expect.recon_error_per_sample},
        {"fairness", expect.objectives.fairness},
        {"group_a_error", expect.residuals.group_a_per_sample},
        {"group_b_error", expect.residuals.group_b_per_sample},
        {"group_a_error_per_sample", expect.residuals.group_a_per_sample},
        {"group_b_error_per_sample", expect.residuals.group_b_per_sample},
        {"group_a_error_raw", expect.residuals.group_a},
        {"group_b_error_raw", expect.residuals.group_b},
    };
    for (const auto& [name, want] : checks) {
      const auto it = row.values.find(name);
      if (it == row.values.end()) continue;
      if (std::abs(it->second - want) > rel_tol * std::max({std::abs(want), std::abs(it->second), 1e-300}))
        result.problems.push_back(where + name + " is " + format_double(it->second) + ", expected " +
                                  format_double(want));
    }
  }
  return result;
}

// ---------------------------------------------------------------- CLI

struct CliState {
  DataOptions data;
  SearchOptions search;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string scaling = "zscore";
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<int> r;
  int r_min = 1;
  std::optional<int> r_max;
  bool verify = false;
  bool svg = false;
  bool timing = false;
  bool export_basis = false;
  bool basis_vectors = false;
  std::string table_path;
  std::optional<int> population, archive, generations, mutation_swaps;
  std::optional<double> crossover;
};

namespace detail {

inline void add_data_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--input", s.data.input, "CSV file with a header row")->required();
  cmd->add_option("--sensitive", s.data.sensitive, "Sensitive column name")->required();
  cmd->add_option("--group-a", s.data.group_a,
                  "Sensitive value(s) of group A; several values binarize a non-binary column")
      ->required()
      ->delimiter(',');
  cmd->add_flag("--keep-sensitive", s.data.keep_sensitive, "Keep the sensitive column as a feature");
  cmd->add_option("--drop", s.data.drop, "Columns to ignore (repeatable or comma-separated)")->delimiter(',');
  cmd->add_option("--scaling", s.scaling, "zscore | pixel | none")
      ->check(CLI::IsMember({"zscore", "pixel", "none"}));
  cmd->add_option("--out", s.out_dir, "Output directory");
  cmd->add_option("--format", s.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

inline void add_search_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--seed", s.seed, "RNG seed (default: config file, else 0)");
  cmd->add_option("--config", s.search.config_path, "SPEA2 config file (JSON or key = value)");
  cmd->add_flag("--exhaustive", s.search.exhaustive, "Enumerate every subset instead of running SPEA2");
  cmd->add_option("--cap", s.search.cap, "Enumeration cap for --exhaustive");
  cmd->add_option("--kind", s.kind, "tabular | image (sets the default generation count)")
      ->check(CLI::IsMember({"tabular", "image"}));
  cmd->add_option("--population", s.population, "Population size override");
  cmd->add_option("--archive", s.archive, "Archive size override");
  cmd->add_option("--generations", s.generations, "Generation count override");
  cmd->add_option("--crossover", s.crossover, "Crossover rate override, percent");
  cmd->add_option("--mutation-swaps", s.mutation_swaps, "Indices replaced per mutation");
}

inline std::string ext(const CliState& s) { return s.format == "json" ? ".json" : ".csv"; }

inline std::string out_path(const CliState& s, const std::string& name) {
  std::filesystem::create_directories(s.out_dir);
  return (std::filesystem::path(s.out_dir) / name).string();
}

inline int finish_verify(const PrincipalBasis& basis, const std::string& path, std::ostream& out, std::ostream& err) {
  const VerifyResult v = verify_table(basis, read_table(path));
  for (const auto& p : v.problems) err << "verify: " << p << '\n';
  out << "verify: " << v.rows << " rows, " << v.problems.size() << " problems\n";
  return v.ok() ? 0 : static_cast<int>(ExitCode::failure);
}

inline void print_row(std::ostream& out, const ReportRow& row, const std::string& label) {
  out << label << " r=" << row.r << " indices(1-based)=[" << row.selection.to_string(1)
      << "] recon_error=" << format_double(row.objectives.recon_error)
      << " fairness=" << format_double(row.objectives.fairness)
      << " group_a_error=" << format_double(row.residuals.group_a_per_sample)
      << " group_b_error=" << format_double(row.residuals.group_b_per_sample) << '\n';
}

}  // namespace detail

/// Entry point of the command-line tool. Exit codes: 0 success, 1 failed
/// verification, 2 input error, 3 config error, 4 enumeration cap.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Fair PCA by multi-objective selection of principal components", "mofpca"};
  app.require_subcommand(1);
  CliState s;

  auto* pca = app.add_subcommand("pca", "Classical top-r PCA objectives and per-group errors");
  detail::add_data_flags(pca, s);
  pca->add_option("--r", s.r, "Target dimension")->required();
  pca->add_flag("--verify", s.verify, "Re-evaluate the written report");
  pca->add_flag("--export-basis", s.export_basis, "Also write basis.json");
  pca->add_flag("--with-vectors", s.basis_vectors, "Include the d x d matrix in basis.json");

  auto* mof = app.add_subcommand("mofpca", "Pareto front over r-subsets of components plus selection");
  detail::add_data_flags(mof, s);
  detail::add_search_flags(mof, s);
  mof->add_option("--r", s.r, "Target dimension (or 'r' in the config file)");
  mof->add_flag("--verify", s.verify, "Re-evaluate the written front");
  mof->add_flag("--svg", s.svg, "Also write a scatter plot of the front");

  auto* swp = app.add_subcommand("sweep", "PCA vs selected-front solution for a range of r");
  detail::add_data_flags(swp, s);
  detail::add_search_flags(swp, s);
  swp->add_option("--r-min", s.r_min, "Smallest r");
  swp->add_option("--r-max", s.r_max, "Largest r (default min(d, 20))");
  swp->add_flag("--verify", s.verify, "Re-evaluate the written table");
  swp->add_flag("--timing", s.timing, "Fill the runtime_ms column (breaks byte-identical reruns)");

  auto* sel = app.add_subcommand("select", "Weighted-sum selection from an existing front file");
  detail::add_data_flags(sel, s);
  sel->add_option("--front", s.table_path, "Front file written by `mofpca` (CSV or JSON)")->required();

  auto* ver = app.add_subcommand("verify", "Re-evaluate every row of a front or sweep file");
  detail::add_data_flags(ver, s);
  ver->add_option("--file", s.table_path, "Front or sweep file (CSV or JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ExitCode::input_error);
  }

  try {
    s.data.scaling = parse_scaling_mode(s.scaling);
    s.search.workers = workers_from_env();
    if (!s.kind.empty()) s.search.kind = s.kind == "image" ? DatasetKind::image : DatasetKind::tabular;
    s.search.overrides.population_size = s.population;
    s.search.overrides.archive_size = s.archive;
    s.search.overrides.generations = s.generations;
    s.search.overrides.crossover_rate = s.crossover;
    s.search.overrides.mutation_swaps = s.mutation_swaps;
    s.search.seed = s.seed ? *s.seed : file_overrides(s.search).seed.value_or(0);

    const Prepared prep = prepare(s.data);
    for (const auto& w : prep.dataset.warnings) err << "warning: " << w << '\n';
    const PrincipalBasis& basis = prep.basis;
    const DatasetKind kind = kind_for(s.search, s.data.scaling);

    if (pca->parsed()) {
      const int r = *s.r;
      if (r < 1 || r > basis.dim())
        throw InputError("r = " + std::to_string(r) + " outside 1.." + std::to_string(basis.dim()));
      const std::vector<ReportRow> rows{ReportRow::describe(basis, ComponentSelection::leading(r))};
      const std::string path = detail::out_path(s, "pca_r" + std::to_string(r) + detail::ext(s));
      write_text(path, s.format == "json" ? front_to_json(rows) : front_to_csv(rows));
      detail::print_row(out, rows.front(), "pca");
      if (s.export_basis) write_text(detail::out_path(s, "basis.json"), basis_to_json(basis, s.basis_vectors).dump(2) + '\n');
      return s.verify ? detail::finish_verify(basis, path, out, err) : 0;
    }

    if (mof->parsed()) {
      if (!s.r) s.r = file_overrides(s.search).r;
      if (!s.r) throw ConfigError("no target dimension: pass --r or set r in the config file");
      const int r = *s.r;
      const SearchOutcome found = search(basis, r, s.search.seed, kind, s.search);
      const auto rows = describe_front(basis, found.front);
      const std::string tag = "_r" + std::to_string(r);
      const std::string path = detail::out_path(s, "front" + tag + detail::ext(s));
      write_text(path, s.format == "json" ? front_to_json(rows) : front_to_csv(rows));
      write_text(detail::out_path(s, "selection" + tag + ".json"),
                 selection_report(basis, found.front, found.weights, found.chosen).dump(2) + '\n');
      if (found.spea2) write_text(detail::out_path(s, "run_log" + tag + ".csv"), run_log_to_csv(found.spea2->log));
      if (s.svg) write_text(detail::out_path(s, "front" + tag + ".svg"), front_to_svg(rows, &found.chosen.selection));
      out << "front: " << rows.size() << " non-dominated selections, lambda=" << format_double(found.weights.lambda)
          << '\n';
      detail::print_row(out, ReportRow::describe(basis, found.chosen.selection), "selected");
      detail::print_row(out, ReportRow::describe(basis, ComponentSelection::leading(r)), "pca");
      return s.verify ? detail::finish_verify(basis, path, out, err) : 0;
    }

    if (swp->parsed()) {
      const int r_max = s.r_max.value_or(std::min(basis.dim(), 20));
      const auto rows = sweep(basis, s.r_min, r_max, kind, s.search, s.timing);
      const std::string path = detail::out_path(s, "sweep" + detail::ext(s));
      write_text(path, s.format == "json" ? sweep_to_json(rows) : sweep_to_csv(rows));
      for (const auto& row : rows) detail::print_row(out, row, row.method);
      return s.verify ? detail::finish_verify(basis, path, out, err) : 0;
    }

    if (sel->parsed()) {
      const auto table = read_table(s.table_path);
      if (table.empty()) throw InputError("front file has no records");
      std::vector<FrontRecord> records;
      for (const auto& row : table) {
        row.selection.validate(basis.dim());
        records.push_back({row.selection, evaluate(basis, row.selection)});
      }
      const auto front = nondominated_filter(std::move(records));
      const SelectionWeights weights = compute_lambda(basis);
      const FrontRecord& chosen = select_solution(front, weights);
      write_text(detail::out_path(s, "selection_r" + std::to_string(chosen.selection.size()) + ".json"),
                 selection_report(basis, front, weights, chosen).dump(2) + '\n');
      out << "lambda=" << format_double(weights.lambda) << '\n';
      detail::print_row(out, ReportRow::describe(basis, chosen.selection), "selected");
      return 0;
    }

    if (ver->parsed()) return detail::finish_verify(basis, s.table_path, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::input_error);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::failure);
  }
  return static_cast<int>(ExitCode::failure);
}

}  // namespace mofpca::harness
