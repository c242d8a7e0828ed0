#include <gtest/gtest.h>

#include "csbp/metric.hpp"

using namespace csbp;

namespace {
PointedTree pointed_segment(double len) {
  PointedTree t = PointedTree::segment(len);
  t.set_pointed({0, 1});
  return t;
}
}  // namespace

TEST(Metric, SegmentsHalfApart) {
  PointedTree a = pointed_segment(1.0), b = pointed_segment(2.0);
  EXPECT_NEAR(metric::gh_lower(a, b), 0.5, 1e-15);
  EXPECT_NEAR(metric::gh_upper(a, b), 0.5, 1e-15);
  auto e = metric::gh_exact_small(a, b, 0.5);
  EXPECT_LE(e.lower, 0.5 + 1e-12);
  EXPECT_GE(e.upper, 0.5 - 1e-12);
}

TEST(Metric, IdentityIsZero) {
  PointedTree a = pointed_segment(1.3);
  a.add_child(0, 0.4);
  EXPECT_EQ(metric::gh_lower(a, a), 0.0);
  EXPECT_EQ(metric::gh_upper(a, a), 0.0);
}

TEST(Metric, FiniteSpacesTwoPoints) {
  std::vector<std::vector<double>> da{{0, 1}, {1, 0}}, db{{0, 3}, {3, 0}};
  EXPECT_NEAR(metric::gh_finite(da, db, 1), 1.0, 1e-15);
}

TEST(Metric, LghBracket) {
  PointedTree a = pointed_segment(1.0), b = pointed_segment(1.5);
  auto l = metric::lgh_numeric(a, b);
  EXPECT_LE(l.lower, l.upper + 1e-12);
  EXPECT_GT(l.lower, 0.0);
  EXPECT_LE(l.upper, 1.0);
}
