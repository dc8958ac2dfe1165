#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace mofpca;

namespace {

std::vector<FrontRecord> records(std::initializer_list<ObjectiveVector> objs) {
  std::vector<FrontRecord> out;
  int i = 0;
  for (const auto& o : objs) out.push_back({ComponentSelection{i++}, o});
  return out;
}

}  // namespace

TEST(Dominates, Examples) {
  EXPECT_TRUE(dominates({1, 2}, {2, 3}));
  EXPECT_FALSE(dominates({2, 3}, {1, 2}));
  EXPECT_FALSE(dominates({1, 3}, {3, 1}));
  EXPECT_FALSE(dominates({3, 1}, {1, 3}));
  EXPECT_FALSE(dominates({2, 2}, {2, 2}));
  EXPECT_TRUE(dominates({2, 1}, {2, 2}));
}

TEST(NondominatedFilter, Examples) {
  const auto front = nondominated_filter(records({{1, 3}, {2, 2}, {3, 1}, {3, 3}}));
  EXPECT_EQ(fx::objectives_of(front), (std::vector<ObjectiveVector>{{1, 3}, {2, 2}, {3, 1}}));
  const auto single = nondominated_filter(records({{5, 5}}));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].objectives, (ObjectiveVector{5, 5}));
  EXPECT_THROW(nondominated_filter({}), InputError);
  EXPECT_THROW(nondominated_filter(records({{std::nan(""), 1}})), InputError);
}

TEST(NondominatedFilter, DuplicateObjectivesKeepSmallestSelection) {
  std::vector<FrontRecord> in{{ComponentSelection{2, 5}, {1, 1}}, {ComponentSelection{0, 7}, {1, 1}},
                              {ComponentSelection{1, 3}, {1, 1}}};
  const auto front = nondominated_filter(in);
  ASSERT_EQ(front.size(), 1u);
  EXPECT_EQ(front[0].selection, (ComponentSelection{0, 7}));
}

TEST(NondominatedFilter, MatchesPairwiseOracleOnRandomPoints) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<FrontRecord> recs;
    std::vector<ObjectiveVector> pts;
    for (int i = 0; i < 100; ++i) {
      // Coarse grid so ties and duplicates occur.
      const ObjectiveVector o{static_cast<double>(rng.below(30)), static_cast<double>(rng.below(30))};
      pts.push_back(o);
      recs.push_back({ComponentSelection{i}, o});
    }
    const auto front = nondominated_filter(recs);
    EXPECT_EQ(fx::objectives_of(front), fx::pairwise_front(pts));
    for (std::size_t i = 1; i < front.size(); ++i) {
      EXPECT_LT(front[i - 1].objectives.recon_error, front[i].objectives.recon_error);
      EXPECT_GT(front[i - 1].objectives.fairness, front[i].objectives.fairness);
    }
    // Every excluded point is dominated by (or equal to) a retained one.
    for (const auto& p : pts) {
      bool covered = false;
      for (const auto& f : front) covered = covered || f.objectives == p || dominates(f.objectives, p);
      EXPECT_TRUE(covered);
    }
  }
}

TEST(BruteForceFront, SingleSelectionWhenRIsD) {
  const auto basis = compute_basis(fx::random_dataset(2, 30, 4));
  const auto front = brute_force_front(basis, 4);
  ASSERT_EQ(front.size(), 1u);
  EXPECT_EQ(front[0].objectives, (ObjectiveVector{0, 0}));
}

TEST(BruteForceFront, ContainsClassicalSelectionAndMatchesOracle) {
  const auto basis = compute_basis(fx::two_group_dataset(4, 40, 60, 6));
  const auto front = brute_force_front(basis, 3);
  ASSERT_FALSE(front.empty());
  EXPECT_EQ(front.front().objectives, evaluate(basis, ComponentSelection::leading(3)));

  std::vector<ObjectiveVector> all;
  std::vector<int> idx{0, 1, 2};
  do all.push_back(evaluate(basis, ComponentSelection(idx)));
  while (next_combination(idx, 6));
  EXPECT_EQ(all.size(), 20u);
  EXPECT_EQ(fx::objectives_of(front), fx::pairwise_front(all));
}

TEST(BruteForceFront, ParallelEqualsSequential) {
  const auto basis = compute_basis(fx::two_group_dataset(8, 100, 150, 14));
  for (int r : {1, 3, 5, 7}) {
    const auto seq = brute_force_front(basis, r, kDefaultEnumerationCap, 1);
    EXPECT_EQ(brute_force_front(basis, r, kDefaultEnumerationCap, 4), seq);
    EXPECT_EQ(brute_force_front(basis, r, kDefaultEnumerationCap, 8), seq);
  }
}

TEST(BruteForceFront, CapAndRangeErrors) {
  const auto basis = compute_basis(fx::random_dataset(2, 30, 10));
  EXPECT_THROW(brute_force_front(basis, 5, 100), EnumerationCapError);
  EXPECT_NO_THROW(brute_force_front(basis, 5, 252));
  EXPECT_THROW(brute_force_front(basis, 0), InputError);
  EXPECT_THROW(brute_force_front(basis, 11), InputError);
}
