#include <gtest/gtest.h>

#include <cmath>

#include "csbp/rng.hpp"
#include "csbp/samplers.hpp"
#include "csbp/stats.hpp"

using namespace csbp;

TEST(Rng, SplitIsDeterministic) {
  RandomStream a(42), b(42);
  RandomStream a1 = a.split(7), b1 = b.split(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a1(), b1());
  RandomStream c = a.split(8);
  EXPECT_NE(a.split(7)(), c());
}

TEST(Rng, UniformRange) {
  RandomStream r(3);
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform_pos();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(5), 5u);
  }
}

TEST(Samplers, TimeChangeThetaOne) {
  ModelParams p{1, 1, 0};
  double s = samplers::time_change_map(p, 1.0, TimeDirection::to_s);
  EXPECT_NEAR(s, (std::exp(2.0) - 1.0) / 2.0, 1e-13);
  EXPECT_NEAR(samplers::time_change_map(p, s, TimeDirection::to_t), 1.0, 1e-12);
}

TEST(Samplers, SGivenYSumsToOne) {
  for (double y : {0.1, 2.0, 15.0}) {
    double tot = 0;
    for (int k = 0; k < 200; ++k) tot += samplers::conditional_S_given_Y(1.3, y, k);
    EXPECT_NEAR(tot, 1.0, 1e-12);
  }
}

TEST(Samplers, ZalphaPmfSumsToOne) {
  ModelParams p{1, 0.5, 2};
  double tot = 0;
  for (int k = 0; k < 200; ++k) tot += samplers::zalpha_count_pmf(p, 1.0, k);
  EXPECT_NEAR(tot, 1.0, 1e-12);
}

TEST(Samplers, ZalphaQuantileInvertsCdf) {
  ModelParams p{2, -0.3, 1};
  for (int k : {0, 3}) {
    double y = samplers::zalpha_value_quantile(p, 0.7, k, 0.37);
    EXPECT_NEAR(samplers::zalpha_value_cdf(p, 0.7, k, y), 0.37, 1e-10);
  }
}

TEST(Samplers, TransitionMeanSmall) {
  // E[Z_t | Z_0 = x] = x e^{-2 beta theta t}
  ModelParams p{1, 0.5, 0};
  RandomStream root(11);
  stats::Running r;
  for (int i = 0; i < 40000; ++i) {
    RandomStream rs = root.split(static_cast<std::uint64_t>(i));
    r.add(samplers::sample_transition(p, 2.0, 1.0, rs));
  }
  EXPECT_LT(std::fabs(r.mean - 2.0 * std::exp(-1.0)) / r.se(), 4.0);
}

TEST(Samplers, ImmigrationMeanCount) {
  ModelParams p{1, 0, 3};
  EXPECT_NEAR(samplers::immigration_mean_count(p, 2.0), 6.0, 1e-12);
}

TEST(Stats, KsIdenticalSamples) {
  std::vector<double> a{0.1, 0.4, 0.7, 0.9};
  auto r = stats::ks_two_sample(a, a);
  EXPECT_EQ(r.d, 0.0);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
}

TEST(Stats, Chi2PerfectFit) {
  auto r = stats::chi2_test({10, 20, 30}, {10, 20, 30});
  EXPECT_EQ(r.stat, 0.0);
  EXPECT_EQ(r.dof, 2);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
}

TEST(Stats, RunChunksIndependentOfJobs) {
  RandomStream root(5);
  std::function<double(std::size_t, RandomStream&, std::size_t, std::size_t)> fn =
      [](std::size_t, RandomStream& rs, std::size_t lo, std::size_t hi) {
        double s = 0;
        for (std::size_t i = lo; i < hi; ++i) s += rs.uniform();
        return s;
      };
  auto a = stats::run_chunks<double>(1000, 16, 1, root, fn);
  auto b = stats::run_chunks<double>(1000, 16, 4, root, fn);
  EXPECT_EQ(a, b);
}
