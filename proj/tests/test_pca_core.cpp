#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace mofpca;
using fx::rel_close;

namespace {

// Axis-aligned data with X^T X = diag(3, 1); group A holds the two rows on
// axis 0, group B the two rows on axis 1.
StandardizedDataset diag_toy() {
  StandardizedDataset ds;
  ds.x.resize(4, 2);
  const double a = std::sqrt(1.5), b = std::sqrt(0.5);
  ds.x << a, 0, -a, 0, 0, b, 0, -b;
  ds.groups = GroupPartition{{0, 1}, {2, 3}};
  return ds;
}

StandardizedDataset duplicated_groups(std::uint64_t seed) {
  const auto half = fx::random_table(seed, 15, 5);
  StandardizedDataset ds;
  ds.x.resize(30, 5);
  ds.x << half.values, half.values;
  std::vector<std::size_t> a(15), b(15);
  for (std::size_t i = 0; i < 15; ++i) a[i] = i, b[i] = 15 + i;
  ds.groups = GroupPartition{a, b};
  return ds;
}

}  // namespace

TEST(ComponentSelection, SortsAndValidates) {
  const ComponentSelection s{4, 1, 2};
  EXPECT_EQ(s.indices(), (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(s.to_string(1), "2 3 5");
  EXPECT_THROW((ComponentSelection{1, 1}), InputError);
  EXPECT_THROW((ComponentSelection{-1, 2}), InputError);
  EXPECT_THROW(s.validate(4), InputError);
  EXPECT_NO_THROW(s.validate(5));
  EXPECT_THROW(ComponentSelection().validate(3), InputError);
}

TEST(Binomial, ValuesAndSaturation) {
  EXPECT_EQ(binomial(23, 5), 33649u);
  EXPECT_EQ(binomial(12, 3), 220u);
  EXPECT_EQ(binomial(5, 5), 1u);
  EXPECT_EQ(binomial(5, 6), 0u);
  EXPECT_EQ(binomial(23, 10), 1144066u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

TEST(NextCombination, EnumeratesAllInOrder) {
  std::vector<int> idx{0, 1};
  std::vector<std::vector<int>> seen{idx};
  while (next_combination(idx, 4)) seen.push_back(idx);
  EXPECT_EQ(seen, (std::vector<std::vector<int>>{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}));
}

TEST(ComputeBasis, AxisAlignedData) {
  const auto basis = compute_basis(diag_toy());
  EXPECT_NEAR(basis.eigenvalues(0), 3.0, 1e-12);
  EXPECT_NEAR(basis.eigenvalues(1), 1.0, 1e-12);
  EXPECT_NEAR(basis.u(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(basis.u(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(basis.group_a_energy(0), 3.0, 1e-12);
  EXPECT_NEAR(basis.group_b_energy(1), 1.0, 1e-12);
}

TEST(ComputeBasis, CorrelatedToyMatchesJacobiOracle) {
  StandardizedDataset ds;
  ds.x.resize(4, 2);
  ds.x << 1, 1, -1, -1, 1, 0.5, -1, -0.5;
  ds.groups = GroupPartition{{0, 2}, {1, 3}};
  const auto basis = compute_basis(ds);
  const auto [values, vectors] = fx::jacobi_eigen(ds.x.transpose() * ds.x);
  // X^T X = [[4, 3], [3, 2.5]]: eigenvalues (6.5 +- sqrt(38.25)) / 2.
  EXPECT_NEAR(values(0), (6.5 + std::sqrt(38.25)) / 2, 1e-12);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(basis.eigenvalues(i), values(i), 1e-8);
    EXPECT_NEAR(std::abs(basis.u.col(i).dot(vectors.col(i))), 1.0, 1e-8);
  }
}

TEST(ComputeBasis, InvariantsOnRandomData) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const int d = 2 + static_cast<int>(seed % 12);
    const auto ds = fx::random_dataset(seed, 20 + static_cast<int>(seed * 5), d);
    const auto basis = compute_basis(ds);
    const Eigen::MatrixXd gram = ds.x.transpose() * ds.x;
    EXPECT_LT((basis.u.transpose() * basis.u - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(rel_close(basis.eigenvalues.sum(), basis.total_energy, 1e-8));
    for (int i = 0; i < d; ++i) {
      if (i + 1 < d) EXPECT_GE(basis.eigenvalues(i), basis.eigenvalues(i + 1));
      EXPECT_NEAR(basis.group_a_energy(i) + basis.group_b_energy(i), basis.eigenvalues(i),
                  1e-8 * basis.eigenvalues(0));
      EXPECT_LT((gram * basis.u.col(i) - basis.eigenvalues(i) * basis.u.col(i)).norm(), 1e-8 * basis.eigenvalues(0));
      Eigen::Index arg = 0;
      basis.u.col(i).cwiseAbs().maxCoeff(&arg);
      EXPECT_GT(basis.u(arg, i), 0.0);
    }
    const auto [values, vectors] = fx::jacobi_eigen(gram);
    for (int i = 0; i < d; ++i) EXPECT_NEAR(basis.eigenvalues(i), values(i), 1e-8 * values(0));
  }
}

TEST(ComputeBasis, RejectsNonFiniteInput) {
  auto ds = diag_toy();
  ds.x(0, 0) = std::nan("");
  EXPECT_THROW(compute_basis(ds), InputError);
}

TEST(Evaluate, FullSelectionIsExact) {
  const auto ds = fx::random_dataset(3, 40, 6);
  const auto basis = compute_basis(ds);
  const auto obj = evaluate(basis, ComponentSelection::leading(6));
  EXPECT_EQ(obj.recon_error, 0.0);
  EXPECT_EQ(obj.fairness, 0.0);
}

TEST(Evaluate, DuplicatedGroupsAreAlwaysFair) {
  const auto ds = duplicated_groups(11);
  const auto basis = compute_basis(ds);
  for (int r = 1; r <= 5; ++r) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    do EXPECT_EQ(evaluate(basis, ComponentSelection(idx)).fairness, 0.0);
    while (next_combination(idx, 5));
  }
}

TEST(Evaluate, DiagToyByHand) {
  const auto ds = diag_toy();
  const auto basis = compute_basis(ds);
  // Keeping axis 0 leaves the eigenvalue-1 mass; per-sample residuals A: 0, B: 1/2.
  const auto top = evaluate(basis, ComponentSelection{0});
  EXPECT_NEAR(top.recon_error, 1.0, 1e-12);
  EXPECT_NEAR(top.fairness, 0.25, 1e-12);
  const auto other = evaluate(basis, ComponentSelection{1});
  EXPECT_NEAR(other.recon_error, 3.0, 1e-12);
  EXPECT_NEAR(other.fairness, 2.25, 1e-12);
  EXPECT_NEAR(evaluate_direct(ds, basis, ComponentSelection{0}).recon_error, 1.0, 1e-12);
}

TEST(Evaluate, MatchesDirectOnEverySubset) {
  const auto ds = fx::random_dataset(17, 20, 6);
  const auto basis = compute_basis(ds);
  std::vector<int> idx{0, 1, 2};
  int count = 0;
  do {
    const ComponentSelection sel(idx);
    const auto fast = evaluate(basis, sel);
    const auto slow = evaluate_direct(ds, basis, sel);
    EXPECT_TRUE(rel_close(fast.recon_error, slow.recon_error, 1e-8)) << sel.to_string();
    EXPECT_TRUE(rel_close(fast.fairness, slow.fairness, 1e-8)) << sel.to_string();
    ++count;
  } while (next_combination(idx, 6));
  EXPECT_EQ(count, 20);
}

TEST(Evaluate, PreconditionErrors) {
  const auto ds = diag_toy();
  const auto basis = compute_basis(ds);
  EXPECT_THROW(evaluate(basis, ComponentSelection{2}), InputError);
  EXPECT_THROW(evaluate(basis, ComponentSelection()), InputError);
  EXPECT_THROW(evaluate_direct(ds, basis, ComponentSelection()), InputError);
}

// Properties: adding an index never increases recon_error; the leading
// selection is the recon optimum among all r-subsets; swapping the group
// labels leaves fairness unchanged.
TEST(Evaluate, MonotonicityOptimalityAndSwapInvariance) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const int d = 7;
    auto ds = fx::random_dataset(seed, 60, d);
    const auto basis = compute_basis(ds);
    auto swapped_ds = ds;
    swapped_ds.groups = ds.groups.swapped();
    const auto swapped = compute_basis(swapped_ds);
    for (int r = 1; r <= d; ++r) {
      const double best = evaluate(basis, ComponentSelection::leading(r)).recon_error;
      std::vector<int> idx(static_cast<std::size_t>(r));
      for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
      do {
        const ComponentSelection sel(idx);
        const auto obj = evaluate(basis, sel);
        EXPECT_GE(obj.recon_error, best);
        EXPECT_EQ(obj.fairness, evaluate(swapped, sel).fairness);
        for (int extra = 0; extra < d; ++extra) {
          if (sel.contains(extra)) continue;
          auto bigger = idx;
          bigger.push_back(extra);
          EXPECT_LE(evaluate(basis, ComponentSelection(bigger)).recon_error, obj.recon_error);
        }
      } while (next_combination(idx, d));
    }
  }
}

TEST(Evaluate, RowPermutationInvariance) {
  const auto ds = fx::random_dataset(5, 50, 5);
  const auto basis = compute_basis(ds);
  // Reverse the rows and remap the partition accordingly.
  StandardizedDataset perm = ds;
  perm.x = ds.x.colwise().reverse();
  std::vector<bool> mask(ds.n(), false);
  for (auto r : ds.groups.group_a_rows) mask[ds.n() - 1 - r] = true;
  perm.groups = GroupPartition::from_mask(mask);
  const auto pbasis = compute_basis(perm);
  std::vector<int> idx{0, 1};
  do {
    const ComponentSelection sel(idx);
    EXPECT_TRUE(rel_close(evaluate(basis, sel).recon_error, evaluate(pbasis, sel).recon_error, 1e-9));
    EXPECT_TRUE(rel_close(evaluate(basis, sel).fairness, evaluate(pbasis, sel).fairness, 1e-9, 1e-12));
  } while (next_combination(idx, 5));
}

TEST(BasisJson, RoundTripPreservesEvaluation) {
  const auto ds = fx::random_dataset(8, 30, 5);
  const auto basis = compute_basis(ds);
  const auto back = basis_from_json(json::parse(basis_to_json(basis, true).dump()));
  EXPECT_EQ(back.u, basis.u);
  EXPECT_EQ(evaluate(back, ComponentSelection{0, 3}), evaluate(basis, ComponentSelection{0, 3}));
  const auto lean = basis_from_json(basis_to_json(basis, false));
  EXPECT_FALSE(lean.has_vectors());
  auto bad = basis_to_json(basis, false);
  bad["schema_version"] = 99;
  EXPECT_THROW(basis_from_json(bad), InputError);
}
