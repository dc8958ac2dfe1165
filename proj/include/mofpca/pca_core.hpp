#pragma once

// Classical PCA basis and the two objectives of a component selection.
//
// Because the columns of U are orthonormal, projecting onto any subset S of
// them leaves a residual whose squared norm splits over the columns not in S:
//
//   ||X - X U_S U_S^T||_F^2 = sum_{i not in S} ||X u_i||^2
//
// and the same holds for each group block. The basis therefore stores the
// per-column energies once and every selection is evaluated with sums.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "error.hpp"

namespace mofpca {

/// A sorted, duplicate-free list of principal component indices (0-based).
class ComponentSelection {
 public:
  ComponentSelection() = default;

  explicit ComponentSelection(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      throw InputError("component selection contains duplicate indices");
    if (!indices_.empty() && indices_.front() < 0)
      throw InputError("component selection contains a negative index");
  }

  ComponentSelection(std::initializer_list<int> indices)
      : ComponentSelection(std::vector<int>(indices)) {}

  /// The classical PCA choice {0, ..., r-1}.
  static ComponentSelection leading(int r) {
    std::vector<int> idx(static_cast<std::size_t>(std::max(r, 0)));
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    return ComponentSelection(std::move(idx));
  }

  [[nodiscard]] const std::vector<int>& indices() const noexcept { return indices_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(indices_.size()); }
  [[nodiscard]] bool empty() const noexcept { return indices_.empty(); }
  [[nodiscard]] bool contains(int i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
  }

  void validate(int d) const {
    if (indices_.empty()) throw InputError("component selection must have r >= 1 indices");
    if (size() > d) throw InputError("component selection larger than the basis dimension");
    if (indices_.back() >= d)
      throw InputError("component index " + std::to_string(indices_.back()) +
                       " out of range for d = " + std::to_string(d));
  }

  /// Space-separated indices, shifted by `base` (0 or 1).
  [[nodiscard]] std::string to_string(int base = 0) const {
    std::string s;
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (i != 0) s += ' ';
      s += std::to_string(indices_[i] + base);
    }
    return s;
  }

  friend bool operator==(const ComponentSelection&, const ComponentSelection&) = default;
  friend auto operator<=>(const ComponentSelection&, const ComponentSelection&) = default;

 private:
  std::vector<int> indices_;
};

struct ObjectiveVector {
  double recon_error = 0.0;  // ||X - X U* U*^T||_F^2
  double fairness = 0.0;     // (err_A / n_A - err_B / n_B)^2

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct PrincipalBasis {
  Eigen::MatrixXd u;            // d x d, column i is the i-th principal direction
  Eigen::VectorXd eigenvalues;  // of X^T X, nonincreasing
  double total_energy = 0.0;    // ||X||_F^2
  Eigen::VectorXd group_a_energy;  // ||X_A u_i||^2
  Eigen::VectorXd group_b_energy;  // ||X_B u_i||^2
  double group_a_total = 0.0;
  double group_b_total = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;

  [[nodiscard]] int dim() const { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] std::size_t n() const { return n_a + n_b; }
  [[nodiscard]] bool has_vectors() const { return u.size() != 0; }
};

/// Reconstruction residuals of a selection, overall and per group.
struct Residuals {
  double total = 0.0;
  double group_a = 0.0;
  double group_b = 0.0;
  double group_a_per_sample = 0.0;
  double group_b_per_sample = 0.0;

  [[nodiscard]] double gap() const { return std::abs(group_a_per_sample - group_b_per_sample); }
};

/// Eigen-decomposes X^T X. Columns are sorted by descending eigenvalue and
/// each is sign-fixed so that its largest-magnitude entry is positive.
inline PrincipalBasis compute_basis(const StandardizedDataset& ds) {
  if (ds.d() < 1) throw InputError("dataset has no columns");
  if (!ds.x.allFinite()) throw InputError("dataset contains non-finite values");
  ds.groups.validate(ds.n());

  const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw InputError("eigendecomposition failed");

  const Eigen::Index d = gram.rows();
  PrincipalBasis b;
  b.u.resize(d, d);
  b.eigenvalues.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    // Solver order is ascending.
    const Eigen::Index src = d - 1 - k;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    b.u.col(k) = v;
    b.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(src));
  }

  const Eigen::MatrixXd xa = ds.group_a();
  const Eigen::MatrixXd xb = ds.group_b();
  b.total_energy = ds.x.squaredNorm();
  b.group_a_total = xa.squaredNorm();
  b.group_b_total = xb.squaredNorm();
  b.group_a_energy = (xa * b.u).colwise().squaredNorm().transpose();
  b.group_b_energy = (xb * b.u).colwise().squaredNorm().transpose();
  b.n_a = ds.groups.group_a_rows.size();
  b.n_b = ds.groups.group_b_rows.size();
  return b;
}

inline Residuals residuals(const PrincipalBasis& basis, const ComponentSelection& sel) {
  sel.validate(basis.dim());
  Residuals res;
  const auto& idx = sel.indices();
  std::size_t next = 0;
  for (int i = 0; i < basis.dim(); ++i) {
    if (next < idx.size() && idx[next] == i) {
      ++next;
      continue;
    }
    res.total += basis.eigenvalues(i);
    res.group_a += basis.group_a_energy(i);
    res.group_b += basis.group_b_energy(i);
  }
  res.group_a_per_sample = res.group_a / static_cast<double>(basis.n_a);
  res.group_b_per_sample = res.group_b / static_cast<double>(basis.n_b);
  return res;
}

/// Objectives from the precomputed energies, summing over the columns left out.
inline ObjectiveVector evaluate(const PrincipalBasis& basis, const ComponentSelection& sel) {
  const Residuals res = residuals(basis, sel);
  const double diff = res.group_a_per_sample - res.group_b_per_sample;
  return {res.total, diff * diff};
}

/// Objectives computed literally from the projection X U* U*^T. Reference
/// path for tests and the harness self-check.
inline ObjectiveVector evaluate_direct(const StandardizedDataset& ds, const PrincipalBasis& basis,
                                       const ComponentSelection& sel) {
  if (!basis.has_vectors()) throw InputError("basis has no vectors; direct evaluation impossible");
  sel.validate(basis.dim());
  const Eigen::MatrixXd us = basis.u(Eigen::all, sel.indices());
  const Eigen::MatrixXd proj = us * us.transpose();
  const auto residual = [&](const Eigen::MatrixXd& m) { return (m - m * proj).squaredNorm(); };
  const Eigen::MatrixXd xa = ds.group_a();
  const Eigen::MatrixXd xb = ds.group_b();
  const double diff = residual(xa) / static_cast<double>(xa.rows()) -
                      residual(xb) / static_cast<double>(xb.rows());
  return {residual(ds.x), diff * diff};
}

/// C(n, k), saturating at UINT64_MAX.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    // c * num / i is exact at every step; guard the multiplication.
    const std::uint64_t g = std::gcd(c, static_cast<std::uint64_t>(i));
    const std::uint64_t c_red = c / g;
    const std::uint64_t den = static_cast<std::uint64_t>(i) / g;
    const std::uint64_t num_red = num / den;
    if (c_red > std::numeric_limits<std::uint64_t>::max() / num_red)
      return std::numeric_limits<std::uint64_t>::max();
    c = c_red * num_red;
  }
  return c;
}

/// Advances `idx` (strictly increasing, values < n) to the next combination in
/// lexicographic order. Returns false after the last one.
inline bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[static_cast<std::size_t>(i)] < n - k + i) {
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace mofpca
