#pragma once

#include <vector>

#include "csbp/analytics.hpp"
#include "csbp/rng.hpp"

namespace csbp {

struct PathSample {
  std::vector<double> grid;
  std::vector<double> values;
  ModelParams meta;
};

enum class TimeDirection { to_s, to_t };

namespace samplers {

double sample_poisson(double mean, RandomStream& rs);
double sample_exponential(double rate, RandomStream& rs);
double sample_gamma(double shape, double rate, RandomStream& rs);
double sample_normal(RandomStream& rs);

// Exact draw of Z_t given Z_0 = x: Poisson(x c_t) exponentials of rate c~_t.
double sample_transition(const ModelParams& p, double x, double t, RandomStream& rs);
// Z_t under N[. | zeta > t].
double sample_entrance_survival(const ModelParams& p, double t, RandomStream& rs);
PathSample sample_csbp_path(const ModelParams& p, double x, const std::vector<double>& grid,
                            RandomStream& rs);

// Jump times of the Poisson process with intensity alpha beta e^{2 beta theta t} on [0,horizon].
std::vector<double> sample_immigration_jumps(const ModelParams& p, double horizon, RandomStream& rs);
double immigration_mean_count(const ModelParams& p, double horizon);

struct ZalphaDraw {
  double value = 0.0;
  int jumps = 0;
};

// Exact draw of Z^alpha_t (Z^alpha_0 = 0).
ZalphaDraw sample_Zalpha_exact(const ModelParams& p, double t, RandomStream& rs);
// Euler scheme for the immigration SDE, negative values clamped to zero.
ZalphaDraw sample_Zalpha_euler(const ModelParams& p, double t, double dt, RandomStream& rs);

// Joint density of (Z^alpha_t, number of immigration jumps on [0,t]) at (y, k):
// Poisson count, and given k jumps a Gamma(k+2, c~_t) value.
double zalpha_joint_density(const ModelParams& p, double t, double y, int k);
// P(k jumps) and the Gamma(k+2, c~_t) cdf, for binning.
double zalpha_count_pmf(const ModelParams& p, double t, int k);
double zalpha_value_cdf(const ModelParams& p, double t, int k, double y);
double zalpha_value_quantile(const ModelParams& p, double t, int k, double q);
// E[e^{-lambda Z^alpha_t}] summed over the jump count.
double zalpha_laplace_series(const ModelParams& p, double t, double lambda);

// P(S = k | Y = y) in the time-changed scale.
double conditional_S_given_Y(double alpha, double y, int k);

// s = 1 / c_t and its inverse.
double time_change_map(const ModelParams& p, double value, TimeDirection dir);

}  // namespace samplers
}  // namespace csbp
