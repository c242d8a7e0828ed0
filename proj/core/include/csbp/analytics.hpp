#pragma once

#include <functional>
#include <stdexcept>

namespace csbp {

struct ModelParams {
  double beta = 1.0;
  double theta = 0.0;
  double alpha = 0.0;

  void validate() const;
  ModelParams with_theta(double th) const { return {beta, th, alpha}; }
  ModelParams with_alpha(double a) const { return {beta, theta, a}; }
};

struct LaplaceQuery {
  double lambda = 0.0;
  double t = 0.0;
  double x = 0.0;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct TransitionValue {
  double atom = 0.0;     // mass at zero
  double density = 0.0;  // density on (0, inf)
};

namespace analytics {

double psi(const ModelParams& p, double lambda);
double psi_inverse(const ModelParams& p, double lambda);

double c_t(const ModelParams& p, double t);
double c_tilde_t(const ModelParams& p, double t);
// Inverse of t -> c_tilde_t on (0, inf); y must exceed 2 theta_+.
double c_tilde_inverse(const ModelParams& p, double y);
// Inverse of t -> c_t; y must exceed 2 theta_-.
double c_inverse(const ModelParams& p, double y);

double u(const ModelParams& p, double lambda, double t);
double survival_mass(const ModelParams& p, double t);

double entrance_density(const ModelParams& p, double t, double x);
TransitionValue transition_density(const ModelParams& p, double t, double x, double y);
double log_transition_density(const ModelParams& p, double t, double x, double y);

double moment_n(const ModelParams& p, double t, int n);

double martingale_M(const ModelParams& p, double t, double z);
double martingale_Mtilde(const ModelParams& p, double t, double z);
double log_martingale_M(const ModelParams& p, double t, double z);
// Same quantity through the modified Bessel function I_1; NaN when out of range.
double martingale_M_bessel(const ModelParams& p, double t, double z);

double biased_laplace_poisson(const ModelParams& p, double s, double lambda);
// N[e^{-lambda Z_s} Z_s e^{2 beta theta s}], the alpha = 0 case of the above.
double biased_laplace_kesten(const ModelParams& p, double s, double lambda);

double girsanov_identity_gap(const ModelParams& p, double lambda, double t);

// log of sum_k z^k / (k! (k+1)!) for z >= 0.
double log_bessel_series(double z);
double bessel_series(double z);

}  // namespace analytics

struct QuadratureSpec {
  double rel_tol = 1e-13;
  double tail_eps = 1e-14;
  unsigned max_depth = 18;
};

namespace quad {

// Adaptive Gauss-Kronrod on [a,b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});
// Integral over [0, inf) of an integrand with at most exponential growth
// followed by exponential decay; the range is cut where |f| falls below
// tail_eps of its peak.
double integrate_halfline(const std::function<double(double)>& f,
                          const QuadratureSpec& spec = {});
// Same for an integrand given by its logarithm; stays accurate when the
// integrand underflows, e.g. a sharp peak far from 1.
double integrate_halfline_log(const std::function<double(double)>& logf,
                              const QuadratureSpec& spec = {});
double cutoff_point(const std::function<double(double)>& f, const QuadratureSpec& spec,
                    double* peak_at = nullptr);

}  // namespace quad

}  // namespace csbp
