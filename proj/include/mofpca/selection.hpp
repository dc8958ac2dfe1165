#pragma once

// Picking one member of a Pareto front by a scale-compensated weighted sum.

#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "dominance.hpp"
#include "error.hpp"
#include "pca_core.hpp"

namespace mofpca {

struct SelectionWeights {
  double lambda = 0.5;  // weight of recon_error; fairness gets 1 - lambda
  double m_re = 0.0;    // recon_error of the first principal component alone
  double m_fm = 0.0;    // smallest fairness over all single-component selections
};

/// lambda = m_fm / (m_re + m_fm); 1/2 when both are zero.
inline SelectionWeights compute_lambda(const PrincipalBasis& basis) {
  if (basis.dim() < 1) throw InputError("basis is empty");
  SelectionWeights w;
  w.m_re = evaluate(basis, ComponentSelection{0}).recon_error;
  w.m_fm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < basis.dim(); ++i) w.m_fm = std::min(w.m_fm, evaluate(basis, ComponentSelection{i}).fairness);
  const double denom = w.m_re + w.m_fm;
  w.lambda = denom > 0.0 ? w.m_fm / denom : 0.5;
  return w;
}

inline double weighted_score(const ObjectiveVector& obj, const SelectionWeights& w) {
  return w.lambda * obj.recon_error + (1.0 - w.lambda) * obj.fairness;
}

/// Front member minimizing the weighted score; ties go to the smaller
/// recon_error, then to the lexicographically smaller selection.
inline const FrontRecord& select_solution(std::span<const FrontRecord> front, const SelectionWeights& weights) {
  if (front.empty()) throw InputError("cannot select from an empty front");
  const FrontRecord* best = &front.front();
  double best_score = weighted_score(best->objectives, weights);
  for (const FrontRecord& rec : front.subspan(1)) {
    const double s = weighted_score(rec.objectives, weights);
    if (std::tie(s, rec.objectives.recon_error, rec.selection) <
        std::tie(best_score, best->objectives.recon_error, best->selection)) {
      best = &rec;
      best_score = s;
    }
  }
  return *best;
}

}  // namespace mofpca
