#include "csbp/analytics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace csbp {

void ModelParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be non-negative");
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
}

namespace analytics {

double psi(const ModelParams& p, double lambda) {
  return p.beta * lambda * lambda + 2.0 * p.beta * p.theta * lambda;
}

double psi_inverse(const ModelParams& p, double lambda) {
  p.validate();
  if (lambda < 0.0) throw DomainError("psi_inverse needs lambda >= 0");
  return -p.theta + std::sqrt(p.theta * p.theta + lambda / p.beta);
}

double c_t(const ModelParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("c_t needs t > 0");
  if (p.theta == 0.0) return 1.0 / (p.beta * t);
  return 2.0 * p.theta / std::expm1(2.0 * p.beta * p.theta * t);
}

double c_tilde_t(const ModelParams& p, double t) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("c_tilde_t needs t > 0");
  if (p.theta == 0.0) return 1.0 / (p.beta * t);
  return 2.0 * p.theta / -std::expm1(-2.0 * p.beta * p.theta * t);
}

double c_tilde_inverse(const ModelParams& p, double y) {
  if (p.theta == 0.0) {
    if (!(y > 0.0)) throw DomainError("c_tilde_inverse out of range");
    return 1.0 / (p.beta * y);
  }
  if (!(y > 2.0 * std::max(p.theta, 0.0))) throw DomainError("c_tilde_inverse out of range");
  return -std::log1p(-2.0 * p.theta / y) / (2.0 * p.beta * p.theta);
}

double c_inverse(const ModelParams& p, double y) {
  if (p.theta == 0.0) {
    if (!(y > 0.0)) throw DomainError("c_inverse out of range");
    return 1.0 / (p.beta * y);
  }
  if (!(y > 2.0 * std::max(-p.theta, 0.0))) throw DomainError("c_inverse out of range");
  return std::log1p(2.0 * p.theta / y) / (2.0 * p.beta * p.theta);
}

double u(const ModelParams& p, double lambda, double t) {
  if (t < 0.0) throw DomainError("u needs t >= 0");
  if (t == 0.0) return lambda;
  double ct = c_t(p, t);
  double ctt = c_tilde_t(p, t);
  if (!(lambda > -ctt)) throw DomainError("u needs lambda > -c_tilde_t");
  return lambda * ct / (ctt + lambda);
}

double survival_mass(const ModelParams& p, double t) { return c_t(p, t); }

double entrance_density(const ModelParams& p, double t, double x) {
  if (!(t > 0.0) || x < 0.0) throw DomainError("entrance_density domain");
  double ct = c_t(p, t);
  double ctt = c_tilde_t(p, t);
  return ct * ctt * std::exp(-ctt * x);
}

double log_bessel_series(double z) {
  if (z < 0.0) throw DomainError("series argument must be non-negative");
  if (z == 0.0) return 0.0;
  if (z <= 700.0) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
      term *= z / ((k + 1.0) * (k + 2.0));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::log(sum);
  }
  // sum z^k/(k!(k+1)!) = I_1(2 sqrt z)/sqrt z; large-argument expansion of I_1
  const double x = 2.0 * std::sqrt(z);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    double m = 2.0 * k - 1.0;
    term *= -(4.0 - m * m) / (8.0 * k * x);
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
  }
  return x - 0.5 * std::log(2.0 * M_PI * x) + std::log(sum) - 0.5 * std::log(z);
}

double bessel_series(double z) { return std::exp(log_bessel_series(z)); }

double log_transition_density(const ModelParams& p, double t, double x, double y) {
  if (!(t > 0.0) || !(x > 0.0) || y < 0.0) throw DomainError("transition_density domain");
  double ct = c_t(p, t);
  double ctt = c_tilde_t(p, t);
  return std::log(x * ct * ctt) - x * ct - ctt * y + log_bessel_series(x * y * ct * ctt);
}

TransitionValue transition_density(const ModelParams& p, double t, double x, double y) {
  TransitionValue v;
  v.atom = std::exp(-x * c_t(p, t));
  v.density = std::exp(log_transition_density(p, t, x, y));
  return v;
}

double moment_n(const ModelParams& p, double t, int n) {
  if (n < 1) throw DomainError("moment_n needs n >= 1");
  double ct = c_t(p, t);
  double ctt = c_tilde_t(p, t);
  double lg = std::lgamma(n + 1.0) + std::log(ct) - n * std::log(ctt);
  if (lg > std::log(std::numeric_limits<double>::max())) throw std::overflow_error("moment_n overflow");
  return std::exp(lg);
}

double log_martingale_M(const ModelParams& p, double t, double z) {
  if (!(t > 0.0) || z < 0.0) throw DomainError("martingale domain");
  if (z == 0.0) return -std::numeric_limits<double>::infinity();
  double g = 2.0 * p.beta * p.theta * t;
  double base = std::log(z) + g;
  if (p.alpha == 0.0) return base;
  return base - p.alpha / c_t(p, t) + log_bessel_series(p.alpha * z * std::exp(g));
}

double martingale_M(const ModelParams& p, double t, double z) {
  if (z == 0.0) {
    if (!(t > 0.0)) throw DomainError("martingale domain");
    return 0.0;
  }
  return std::exp(log_martingale_M(p, t, z));
}

double martingale_Mtilde(const ModelParams& p, double t, double z) {
  if (z == 0.0) return martingale_M(p.with_theta(-p.theta), t, z);
  return std::exp(2.0 * p.theta * z + log_martingale_M(p.with_theta(-p.theta), t, z));
}

double martingale_M_bessel(const ModelParams& p, double t, double z) {
  if (!(t > 0.0) || z < 0.0) throw DomainError("martingale domain");
  double g = 2.0 * p.beta * p.theta * t;
  if (z == 0.0) return 0.0;
  if (p.alpha == 0.0) return z * std::exp(g);
  double w = p.alpha * z * std::exp(g);
  double arg = 2.0 * std::sqrt(w);
  if (arg > 700.0) return std::numeric_limits<double>::quiet_NaN();
  double i1 = boost::math::cyl_bessel_i(1, arg);
  double m = std::exp(std::log(z) + g - p.alpha / c_t(p, t) + std::log(i1) - 0.5 * std::log(w));
  // subnormal results carry too few digits to compare against
  return std::isnormal(m) ? m : std::numeric_limits<double>::quiet_NaN();
}

double biased_laplace_poisson(const ModelParams& p, double s, double lambda) {
  if (!(s > 0.0) || lambda < 0.0) throw DomainError("biased_laplace_poisson domain");
  double c = c_t(p, s);
  double ct = c_tilde_t(p, s);
  double g = 2.0 * p.beta * p.theta * s;
  double b = ct + lambda;
  return c * ct / (b * b) * std::exp(g - p.alpha / c + p.alpha * std::exp(g) / b);
}

double biased_laplace_kesten(const ModelParams& p, double s, double lambda) {
  return biased_laplace_poisson(p.with_alpha(0.0), s, lambda);
}

double girsanov_identity_gap(const ModelParams& p, double lambda, double t) {
  ModelParams neg = p.with_theta(-p.theta);
  double lo = std::max(0.0, 2.0 * p.theta) - c_tilde_t(p, t);
  if (!(lambda > lo)) throw DomainError("girsanov_identity_gap domain");
  return u(neg, lambda, t) - u(p, lambda - 2.0 * p.theta, t) - 2.0 * p.theta;
}

}  // namespace analytics

namespace quad {

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  if (b <= a) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, spec.max_depth,
                                                                       spec.rel_tol, &err);
}

double cutoff_point(const std::function<double(double)>& f, const QuadratureSpec& spec,
                    double* peak_at) {
  double peak = 0.0, xpeak = 0.0;
  std::vector<double> xs, vs;
  for (int k = -40; k <= 80; ++k) {
    double x = std::ldexp(1.0, k);
    double v = std::fabs(f(x));
    if (!std::isfinite(v)) v = 0.0;
    xs.push_back(x);
    vs.push_back(v);
    if (v > peak) {
      peak = v;
      xpeak = x;
    }
  }
  if (peak_at) *peak_at = xpeak;
  if (peak == 0.0) return 1.0;
  // last grid point still above the threshold, then one doubling beyond it
  double thr = spec.tail_eps * peak * 1e-3;
  std::size_t last = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (vs[i] > thr) last = i;
  double hi = xs[std::min(last + 1, xs.size() - 1)];
  // bisect the geometric bracket for a tighter cut
  double lo = xs[last];
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    if (std::fabs(f(mid)) > thr) lo = mid; else hi = mid;
  }
  return hi;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

// Bisect until the Kronrod error is below the global budget share, at rounding level,
// or stalls.
double adapt(const std::function<double(double)>& f, double a, double b, double budget, double width,
             unsigned depth, double v, double err, double l1) {
  if (err <= budget * (b - a) / width || err <= 1e3 * std::numeric_limits<double>::epsilon() * l1 ||
      depth == 0)
    return v;
  double m = 0.5 * (a + b);
  double e1 = 0.0, e2 = 0.0, n1 = 0.0, n2 = 0.0;
  double v1 = GK::integrate(f, a, m, 0, 0.0, &e1, &n1);
  double v2 = GK::integrate(f, m, b, 0, 0.0, &e2, &n2);
  // halving did not shrink the estimate: the integrand is noisy at this scale
  if (e1 + e2 > 0.9 * err) return v1 + v2;
  return adapt(f, a, m, budget, width, depth - 1, v1, e1, n1) +
         adapt(f, m, b, budget, width, depth - 1, v2, e2, n2);
}

}  // namespace

double integrate_halfline(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  double xpeak = 0.0;
  double xmax = cutoff_point(f, spec, &xpeak);
  // panels scaled to the peak location keep each Kronrod rule well resolved
  std::vector<double> cuts{0.0};
  double step = std::max(xpeak, xmax / 64.0);
  for (double x = step; x < xmax; x += step) cuts.push_back(x);
  cuts.push_back(xmax);
  std::size_t np = cuts.size() - 1;
  std::vector<double> v(np), e(np), l1(np);
  double scale = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    v[i] = GK::integrate(f, cuts[i], cuts[i + 1], 0, 0.0, &e[i], &l1[i]);
    scale += l1[i];
  }
  double budget = spec.rel_tol * scale;
  double total = 0.0;
  for (std::size_t i = 0; i < np; ++i)
    total += adapt(f, cuts[i], cuts[i + 1], budget, xmax, spec.max_depth, v[i], e[i], l1[i]);
  return total;
}

double integrate_halfline_log(const std::function<double(double)>& logf, const QuadratureSpec& spec) {
  auto lf = [&](double x) {
    double v = logf(x);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  int best = 0;
  double lbest = -std::numeric_limits<double>::infinity();
  for (int k = -40; k <= 80; ++k) {
    double v = lf(std::ldexp(1.0, k));
    if (v > lbest) {
      lbest = v;
      best = k;
    }
  }
  if (!std::isfinite(lbest)) return 0.0;
  // golden section on log x; the integrands here are unimodal
  double xpk = std::ldexp(1.0, best), lpk = lbest;
  if (best > -40) {
    double a = (best - 1) * M_LN2, b = (best + 1) * M_LN2;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = lf(std::exp(c)), fd = lf(std::exp(d));
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = lf(std::exp(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = lf(std::exp(d));
      }
    }
    double xm = std::exp(0.5 * (a + b)), lm = lf(xm);
    if (lm > lpk) {
      xpk = xm;
      lpk = lm;
    }
  }
  const double drop = -std::log(spec.tail_eps) + 10.0;
  auto below = [&](double x) { return lf(x) < lpk - drop; };
  // right edge: double the offset until the drop is reached, then bisect
  double d = std::max(xpk * 1e-10, 1e-300);
  while (!below(xpk + d) && d < 1e300) d *= 2.0;
  double lo = 0.5 * d, hi = d;
  for (int it = 0; it < 60; ++it) {
    double m = 0.5 * (lo + hi);
    (below(xpk + m) ? hi : lo) = m;
  }
  double right = xpk + hi;
  double left = 0.0;
  d = std::max(xpk * 1e-10, 1e-300);
  while (d < xpk && !below(xpk - d)) d *= 2.0;
  if (d < xpk) {
    lo = 0.5 * d;
    hi = d;
    for (int it = 0; it < 60; ++it) {
      double m = 0.5 * (lo + hi);
      (below(xpk - m) ? hi : lo) = m;
    }
    left = xpk - hi;
  }
  auto f = [&](double x) { return std::exp(lf(x) - lpk); };
  const int np = 64;
  std::vector<double> v(np), e(np), l1(np);
  double scale = 0.0, width = right - left;
  for (int i = 0; i < np; ++i) {
    double a = left + width * i / np, b = left + width * (i + 1) / np;
    v[i] = GK::integrate(f, a, b, 0, 0.0, &e[i], &l1[i]);
    scale += l1[i];
  }
  double total = 0.0;
  for (int i = 0; i < np; ++i)
    total += adapt(f, left + width * i / np, left + width * (i + 1) / np, spec.rel_tol * scale, width,
                   spec.max_depth, v[i], e[i], l1[i]);
  return std::exp(lpk + std::log(total));
}

}  // namespace quad

}  // namespace csbp
