#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "error.hpp"
#include "parallel.hpp"
#include "pca_core.hpp"

namespace mofpca {

struct FrontRecord {
  ComponentSelection selection;
  ObjectiveVector objectives;

  friend bool operator==(const FrontRecord&, const FrontRecord&) = default;
};

/// Pareto dominance for minimization: no worse in both objectives and
/// strictly better in at least one. Comparisons are exact.
inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept {
  return a.recon_error <= b.recon_error && a.fairness <= b.fairness &&
         (a.recon_error < b.recon_error || a.fairness < b.fairness);
}

/// Non-dominated subset, sorted by ascending recon_error. Of several records
/// sharing an objective vector only the lexicographically smallest selection
/// is kept, so along the result fairness is strictly decreasing.
inline std::vector<FrontRecord> nondominated_filter(std::vector<FrontRecord> records) {
  if (records.empty()) throw InputError("cannot filter an empty record list");
  for (const auto& rec : records)
    if (!std::isfinite(rec.objectives.recon_error) || !std::isfinite(rec.objectives.fairness))
      throw InputError("non-finite objective value");

  std::sort(records.begin(), records.end(), [](const FrontRecord& a, const FrontRecord& b) {
    return std::tie(a.objectives.recon_error, a.objectives.fairness, a.selection) <
           std::tie(b.objectives.recon_error, b.objectives.fairness, b.selection);
  });

  // After the sort, a record survives iff its fairness beats every earlier one.
  std::vector<FrontRecord> front;
  double best_fairness = std::numeric_limits<double>::infinity();
  for (auto& rec : records) {
    if (rec.objectives.fairness < best_fairness) {
      best_fairness = rec.objectives.fairness;
      front.push_back(std::move(rec));
    }
  }
  return front;
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

/// Exact Pareto front over all C(d, r) selections. The enumeration is split by
/// leading index across workers; each part is filtered locally and the parts
/// are merged, which gives the same front as a sequential pass.
inline std::vector<FrontRecord> brute_force_front(const PrincipalBasis& basis, int r,
                                                  std::uint64_t cap = kDefaultEnumerationCap,
                                                  std::size_t workers = 1) {
  const int d = basis.dim();
  if (r < 1 || r > d)
    throw InputError("r = " + std::to_string(r) + " outside 1.." + std::to_string(d));
  const std::uint64_t count = binomial(d, r);
  if (count > cap)
    throw EnumerationCapError("C(" + std::to_string(d) + ", " + std::to_string(r) + ") = " +
                              (count == std::numeric_limits<std::uint64_t>::max()
                                   ? std::string("overflow")
                                   : std::to_string(count)) +
                              " exceeds the enumeration cap " + std::to_string(cap));

  const std::size_t parts = static_cast<std::size_t>(d - r + 1);
  std::vector<std::vector<FrontRecord>> partial(parts);
  parallel_for(parts, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t lead = begin; lead < end; ++lead) {
      std::vector<int> idx(static_cast<std::size_t>(r));
      for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = static_cast<int>(lead) + i;
      std::vector<FrontRecord> local;
      do {
        if (idx.front() != static_cast<int>(lead)) break;
        ComponentSelection sel(idx);
        const ObjectiveVector obj = evaluate(basis, sel);
        local.push_back({std::move(sel), obj});
        if (local.size() >= 8192) local = nondominated_filter(std::move(local));
      } while (next_combination(idx, d));
      partial[lead] = nondominated_filter(std::move(local));
    }
  });

  std::vector<FrontRecord> merged;
  for (auto& p : partial) merged.insert(merged.end(), p.begin(), p.end());
  return nondominated_filter(std::move(merged));
}

}  // namespace mofpca
