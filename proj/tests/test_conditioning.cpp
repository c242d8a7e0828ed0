#include <gtest/gtest.h>

#include <cmath>

#include "csbp/conditioning.hpp"

using namespace csbp;

TEST(Conditioning, ExtinctionLimitCritical) {
  ModelParams p{1, 0, 0};
  RegimeClass rc{Regime::extinction, 0.0};
  EXPECT_NEAR(conditioning::limit_value(p, rc, 1.0, 1.0), 0.5, 1e-15);
}

TEST(Conditioning, UnitFunctionalAtZeroLambda) {
  ModelParams p{1, 0.5, 0};
  EXPECT_NEAR(conditioning::limit_value(p, {Regime::kesten, 0.0}, 0.0, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(conditioning::limit_value(p, {Regime::poisson, 2.0}, 0.0, 1.0), 1.0, 1e-10);
}

TEST(Conditioning, AtRegression) {
  // conditioning time 10, observed at s = 1, level a = 100; mpmath, 30 digits
  ModelParams p{1, 0, 0};
  double v = conditioning::conditional_laplace_At(p, 1.0, 1.0, 9.0, 100.0);
  EXPECT_NEAR(v, 0.16365028085906701375324724457, 1e-9);
  EXPECT_NEAR(conditioning::conditional_laplace_At_closed(p, 1.0, 1.0, 9.0, 100.0), v, 1e-9);
}

TEST(Conditioning, Classification) {
  ModelParams p{1, 0, 0};
  EXPECT_EQ(conditioning::classify(RegimeSpec::zero_after(0.0), p).regime, Regime::extinction);
  EXPECT_EQ(conditioning::classify(RegimeSpec::power(1, 0.5), p).regime, Regime::kesten);
  RegimeClass pc = conditioning::classify(RegimeSpec::power(1, 2), p);
  EXPECT_EQ(pc.regime, Regime::poisson);
}

TEST(Conditioning, HighRegimeUnsupported) {
  ModelParams p{1, 0, 0};
  EXPECT_THROW(conditioning::limit_value(p, {Regime::high, 0.0}, 1.0, 1.0), UnsupportedRegime);
}

TEST(Conditioning, MonotoneThreshold) {
  std::vector<ConvergenceRow> rows(4);
  double errs[] = {0.1, 0.3, 0.2, 0.05};
  for (int i = 0; i < 4; ++i) rows[i].abs_err = errs[i];
  EXPECT_EQ(conditioning::monotone_threshold(rows), 1u);
}
