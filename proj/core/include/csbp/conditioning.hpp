#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "csbp/analytics.hpp"

namespace csbp {

enum class Regime { extinction, kesten, poisson, high };

struct RegimeClass {
  Regime regime = Regime::kesten;
  double alpha = 0.0;  // Poisson weight, when regime == poisson
};

// Conditioning level a_t.
struct RegimeSpec {
  enum class Shape { zero_after, table, power, exponential };
  Shape shape = Shape::power;
  double c = 1.0;
  double exponent = 1.0;  // p for power, r for exponential
  double t0 = 0.0;        // zero_after
  std::vector<double> ts, as;  // table, increasing ts

  static RegimeSpec zero_after(double t0);
  static RegimeSpec power(double c, double p);
  static RegimeSpec exponential(double c, double r);
  static RegimeSpec table(std::vector<double> ts, std::vector<double> as);

  double at(double t) const;
  std::string describe() const;
};

std::string regime_name(Regime r);

class UnsupportedRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConvergenceRow {
  double t = 0.0;
  double a = 0.0;
  double At = 0.0;
  double limit = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

namespace conditioning {

// N^theta[e^{-lambda Z_s} | Z_{t+s} = a] by quadrature against the entrance law.
double conditional_laplace_At(const ModelParams& p, double lambda, double s, double t, double a,
                              const QuadratureSpec& spec = {});
// Same quantity from the closed form of the x-integral.
double conditional_laplace_At_closed(const ModelParams& p, double lambda, double s, double t, double a);
// N^theta[(1 - e^{-lambda Z_s}) ; Z_{t+s} = 0] by quadrature.
double conditional_extinction_At(const ModelParams& p, double lambda, double s, double t,
                                 const QuadratureSpec& spec = {});

RegimeClass classify(const RegimeSpec& spec, const ModelParams& p);
// Limit of the conditional functional; for extinction H_s = 1 - e^{-lambda Z_s}.
double limit_value(const ModelParams& p, const RegimeClass& regime, double lambda, double s);

// t is the conditioning time; the functional is observed at s < t.
std::vector<ConvergenceRow> convergence_experiment(const ModelParams& p, const RegimeSpec& spec,
                                                   double lambda, double s,
                                                   const std::vector<double>& t_grid, int jobs = 1,
                                                   const QuadratureSpec& qspec = {});
// Index of the first row after which abs_err is non-increasing; rows.size() if none.
std::size_t monotone_threshold(const std::vector<ConvergenceRow>& rows);

}  // namespace conditioning
}  // namespace csbp
