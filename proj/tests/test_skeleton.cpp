#include <gtest/gtest.h>

#include <cmath>

#include "csbp/decorate.hpp"
#include "csbp/skeleton.hpp"

using namespace csbp;

TEST(Skeleton, TnShape) {
  RandomStream rs(4);
  HeightDensity d = HeightDensity::uniform(1.0);
  PointedTree t = skeleton::sample_Tn(4, d, 1.0, rs);
  EXPECT_EQ(t.n_pointed(), 4);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(t.height(t.pointed(i)), 1.0);
  double low = evaluate_statistic(t, TreeStatistic::lowest_branch_height);
  EXPECT_GE(low, 0.0);
  EXPECT_LE(low, 1.0);
}

TEST(Skeleton, ModerateDensityNormalized) {
  HeightDensity d = HeightDensity::moderate(1.0, 0.5, 2.0);
  EXPECT_NEAR(d.cdf(2.0), 1.0, 1e-14);
  EXPECT_NEAR(d.cdf(d.quantile(0.3)), 0.3, 1e-12);
}

TEST(Skeleton, IntensityInverse) {
  Intensity f{1.5, 0.8};
  EXPECT_NEAR(f.inverse_cumulative(f.cumulative(0.7)), 0.7, 1e-12);
  Intensity g{2.0, 0.0};
  EXPECT_NEAR(g.cumulative(3.0), 6.0, 1e-14);
}

TEST(Skeleton, StatisticsOnSegment) {
  PointedTree s = PointedTree::segment(2.0);
  s.set_pointed({0, 1});
  EXPECT_EQ(evaluate_statistic(s, TreeStatistic::total_length), 2.0);
  EXPECT_EQ(evaluate_statistic(s, TreeStatistic::one), 1.0);
}

TEST(Decorate, KestenDrawIsDeterministic) {
  ModelParams p{1, 0.3, 0};
  RandomStream a(21), b(21);
  EXPECT_EQ(decorate::sample_kesten_Zs(p, 1.0, a), decorate::sample_kesten_Zs(p, 1.0, b));
}

TEST(Decorate, FiniteTreeStubsAboveCutoff) {
  ModelParams p{1, 0.3, 1};
  RandomStream rs(8);
  DecoratedBackbone d = decorate::build_finite_decorated_tree(p, 1.0, 0.05, rs);
  for (const auto& r : d.decorations) EXPECT_GT(r.survival, 0.05);
  EXPECT_GE(d.tree.size(), d.backbone.size());
}
