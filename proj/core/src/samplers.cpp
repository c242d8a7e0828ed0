#include "csbp/samplers.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <random>

namespace csbp::samplers {

double sample_poisson(double mean, RandomStream& rs) {
  if (mean <= 0.0) return 0.0;
  std::poisson_distribution<long long> d(mean);
  return static_cast<double>(d(rs));
}

double sample_exponential(double rate, RandomStream& rs) { return -std::log(rs.uniform_pos()) / rate; }

double sample_gamma(double shape, double rate, RandomStream& rs) {
  std::gamma_distribution<double> d(shape, 1.0 / rate);
  return d(rs);
}

double sample_normal(RandomStream& rs) {
  // Marsaglia polar, no cached second value so the stream position is explicit
  for (;;) {
    double a = 2.0 * rs.uniform() - 1.0;
    double b = 2.0 * rs.uniform() - 1.0;
    double s = a * a + b * b;
    if (s > 0.0 && s < 1.0) return a * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double sample_transition(const ModelParams& p, double x, double t, RandomStream& rs) {
  if (x < 0.0 || !(t > 0.0)) throw DomainError("sample_transition domain");
  if (x == 0.0) return 0.0;
  double n = sample_poisson(x * analytics::c_t(p, t), rs);
  if (n == 0.0) return 0.0;
  return sample_gamma(n, analytics::c_tilde_t(p, t), rs);
}

double sample_entrance_survival(const ModelParams& p, double t, RandomStream& rs) {
  if (!(t > 0.0)) throw DomainError("sample_entrance_survival domain");
  return sample_exponential(analytics::c_tilde_t(p, t), rs);
}

PathSample sample_csbp_path(const ModelParams& p, double x, const std::vector<double>& grid,
                            RandomStream& rs) {
  PathSample out;
  out.grid = grid;
  out.meta = p;
  double prev_t = 0.0, z = x;
  for (double t : grid) {
    if (t < prev_t) throw DomainError("grid must be increasing");
    if (t > prev_t) z = sample_transition(p, z, t - prev_t, rs);
    out.values.push_back(z);
    prev_t = t;
  }
  return out;
}

double immigration_mean_count(const ModelParams& p, double horizon) {
  if (p.theta == 0.0) return p.alpha * p.beta * horizon;
  return p.alpha * std::expm1(2.0 * p.beta * p.theta * horizon) / (2.0 * p.theta);
}

std::vector<double> sample_immigration_jumps(const ModelParams& p, double horizon, RandomStream& rs) {
  std::vector<double> out;
  if (p.alpha == 0.0) return out;
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  double total = immigration_mean_count(p, horizon);
  double y = 0.0;
  for (;;) {
    y += sample_exponential(1.0, rs);
    if (y > total) break;
    double t = p.theta == 0.0 ? y / (p.alpha * p.beta)
                              : std::log1p(2.0 * p.theta * y / p.alpha) / (2.0 * p.beta * p.theta);
    out.push_back(std::min(t, horizon));
  }
  return out;
}

ZalphaDraw sample_Zalpha_exact(const ModelParams& p, double t, RandomStream& rs) {
  if (!(t > 0.0)) throw DomainError("sample_Zalpha_exact domain");
  ZalphaDraw d;
  std::vector<double> jumps = sample_immigration_jumps(p, t, rs);
  // Each lineage started at time r (the founder at 0, one per jump) carries
  // a Gamma(2, c~_{t-r}) mass at time t.
  d.value = sample_gamma(2.0, analytics::c_tilde_t(p, t), rs);
  for (double r : jumps) {
    if (t - r > 0.0) d.value += sample_gamma(2.0, analytics::c_tilde_t(p, t - r), rs);
  }
  d.jumps = static_cast<int>(jumps.size());
  return d;
}

ZalphaDraw sample_Zalpha_euler(const ModelParams& p, double t, double dt, RandomStream& rs) {
  if (!(t > 0.0) || !(dt > 0.0)) throw DomainError("sample_Zalpha_euler domain");
  ZalphaDraw d;
  std::vector<double> jumps = sample_immigration_jumps(p, t, rs);
  long long steps = static_cast<long long>(std::ceil(t / dt - 1e-9));
  double h = t / static_cast<double>(steps);
  double sq = std::sqrt(2.0 * p.beta * h);
  double z = 0.0;
  std::size_t next = 0;
  for (long long i = 0; i < steps; ++i) {
    double now = i * h;
    while (next < jumps.size() && jumps[next] <= now) ++next;
    double drift = -2.0 * p.beta * p.theta * z + 2.0 * p.beta * (static_cast<double>(next) + 1.0);
    z += sq * std::sqrt(z) * sample_normal(rs) + drift * h;
    if (z < 0.0) z = 0.0;
  }
  d.value = z;
  d.jumps = static_cast<int>(jumps.size());
  return d;
}

double zalpha_count_pmf(const ModelParams& p, double t, int k) {
  if (k < 0) return 0.0;
  double m = immigration_mean_count(p, t);
  if (m == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(m) - m - std::lgamma(k + 1.0));
}

double zalpha_value_cdf(const ModelParams& p, double t, int k, double y) {
  if (y <= 0.0) return 0.0;
  boost::math::gamma_distribution<double> g(k + 2.0, 1.0 / analytics::c_tilde_t(p, t));
  return boost::math::cdf(g, y);
}

double zalpha_value_quantile(const ModelParams& p, double t, int k, double q) {
  boost::math::gamma_distribution<double> g(k + 2.0, 1.0 / analytics::c_tilde_t(p, t));
  return boost::math::quantile(g, q);
}

double zalpha_joint_density(const ModelParams& p, double t, double y, int k) {
  if (!(t > 0.0)) throw DomainError("zalpha_joint_density domain");
  if (y <= 0.0 || k < 0) return 0.0;
  double ct = analytics::c_tilde_t(p, t);
  double lg = (k + 2.0) * std::log(ct) + (k + 1.0) * std::log(y) - ct * y - std::lgamma(k + 2.0);
  return zalpha_count_pmf(p, t, k) * std::exp(lg);
}

double zalpha_laplace_series(const ModelParams& p, double t, double lambda) {
  if (!(t > 0.0) || lambda < 0.0) throw DomainError("zalpha_laplace_series domain");
  double ct = analytics::c_tilde_t(p, t);
  double r = ct / (ct + lambda);
  double m = immigration_mean_count(p, t);
  // sum_k e^{-m} m^k / k! r^{k+2} with term recursion
  double term = std::exp(-m) * r * r, sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= m * r / k;
    sum += term;
    if (term < 1e-17 * sum && k > m) break;
  }
  return sum;
}

double conditional_S_given_Y(double alpha, double y, int k) {
  if (k < 0 || y < 0.0) return 0.0;
  if (y == 0.0 || alpha == 0.0) return k == 0 ? 1.0 : 0.0;
  double ay = alpha * y;
  return std::exp(k * std::log(ay) - std::lgamma(k + 1.0) - std::lgamma(k + 2.0) -
                  analytics::log_bessel_series(ay));
}

double time_change_map(const ModelParams& p, double value, TimeDirection dir) {
  if (dir == TimeDirection::to_s) return 1.0 / analytics::c_t(p, value);
  if (!(value > 0.0)) throw DomainError("time_change_map domain");
  return analytics::c_inverse(p, 1.0 / value);
}

}  // namespace csbp::samplers
