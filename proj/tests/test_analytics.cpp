#include <gtest/gtest.h>

#include <cmath>

#include "csbp/analytics.hpp"

using namespace csbp;

namespace {
ModelParams P(double b, double th, double a = 0.0) { return {b, th, a}; }
}  // namespace

TEST(Analytics, PsiValues) {
  EXPECT_DOUBLE_EQ(analytics::psi(P(1, 1), 1.0), 3.0);
  EXPECT_DOUBLE_EQ(analytics::psi_inverse(P(1, -1), 0.0), 2.0);
  EXPECT_NEAR(analytics::psi(P(2, 0.3), analytics::psi_inverse(P(2, 0.3), 1.7)), 1.7, 1e-13);
}

TEST(Analytics, CriticalCAtTwo) {
  EXPECT_NEAR(analytics::c_t(P(1, 0), 2.0), 0.5, 1e-15);
  EXPECT_NEAR(analytics::c_tilde_t(P(1, 0), 2.0), 0.5, 1e-15);
}

TEST(Analytics, CtThetaOne) {
  EXPECT_NEAR(analytics::c_t(P(1, 1), 1.0), 2.0 / (std::exp(2.0) - 1.0), 1e-15);
  EXPECT_NEAR(analytics::c_tilde_t(P(1, 1), 1.0) - analytics::c_t(P(1, 1), 1.0), 2.0, 1e-14);
}

TEST(Analytics, SmallThetaMatchesCritical) {
  // series branch near theta = 0
  double a = analytics::c_t(P(1.3, 1e-10), 0.7);
  EXPECT_NEAR(a, 1.0 / (1.3 * 0.7), 1e-9);
}

TEST(Analytics, UCritical) { EXPECT_NEAR(analytics::u(P(1, 0), 1.0, 1.0), 0.5, 1e-15); }

TEST(Analytics, EntranceDensityAtZero) {
  EXPECT_NEAR(analytics::entrance_density(P(1, 0), 1.0, 1e-300), 1.0, 1e-14);
}

TEST(Analytics, SecondMoment) { EXPECT_NEAR(analytics::moment_n(P(1, 0), 1.0, 2), 2.0, 1e-14); }

TEST(Analytics, MartingaleAlphaZero) {
  for (double z : {0.1, 1.0, 4.0}) {
    ModelParams p = P(1.5, 0.4, 0.0);
    EXPECT_NEAR(analytics::martingale_M(p, 0.8, z), z * std::exp(2 * 1.5 * 0.4 * 0.8), 1e-12);
  }
}

TEST(Analytics, GirsanovGapZero) {
  EXPECT_NEAR(analytics::girsanov_identity_gap(P(1, 1), 3.0, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(analytics::girsanov_identity_gap(P(2, -0.5), 1.0, 2.0), 0.0, 1e-12);
}

TEST(Analytics, BesselFormMatchesSeries) {
  ModelParams p = P(1, 0.2, 1.5);
  for (double z : {0.01, 0.5, 3.0, 20.0})
    EXPECT_NEAR(analytics::martingale_M_bessel(p, 1.0, z) / analytics::martingale_M(p, 1.0, z), 1.0, 1e-12);
}

TEST(Analytics, BiasedLaplaceRegression) {
  // mpmath, 30 digits
  EXPECT_NEAR(analytics::biased_laplace_poisson(P(1, 0, 1), 1.0, 1.0), 0.151632664928158355900949883748, 1e-12);
}

TEST(Analytics, RejectsBadParams) {
  EXPECT_THROW(analytics::c_t(P(0, 0), 1.0), DomainError);
  EXPECT_THROW(analytics::c_t(P(1, 0), -1.0), DomainError);
}

TEST(Quadrature, GaussianHalfline) {
  double v = quad::integrate_halfline([](double x) { return std::exp(-x * x); });
  EXPECT_NEAR(v, std::sqrt(M_PI) / 2, 1e-12);
  double w = quad::integrate_halfline_log([](double x) { return -x * x; });
  EXPECT_NEAR(w, std::sqrt(M_PI) / 2, 1e-12);
}

TEST(Quadrature, SharpPeakLogForm) {
  // Gamma(2001, 1) density integrates to one; peak far out at 2000
  double lg = std::lgamma(2001.0);
  double v = quad::integrate_halfline_log([&](double x) { return 2000.0 * std::log(x) - x - lg; });
  EXPECT_NEAR(v, 1.0, 1e-10);
}
