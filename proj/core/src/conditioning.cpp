#include "csbp/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csbp/stats.hpp"

namespace csbp {

RegimeSpec RegimeSpec::zero_after(double t0) {
  RegimeSpec r;
  r.shape = Shape::zero_after;
  r.t0 = t0;
  return r;
}

RegimeSpec RegimeSpec::power(double c, double p) {
  RegimeSpec r;
  r.shape = Shape::power;
  r.c = c;
  r.exponent = p;
  return r;
}

RegimeSpec RegimeSpec::exponential(double c, double rate) {
  RegimeSpec r;
  r.shape = Shape::exponential;
  r.c = c;
  r.exponent = rate;
  return r;
}

RegimeSpec RegimeSpec::table(std::vector<double> ts, std::vector<double> as) {
  if (ts.size() != as.size() || ts.size() < 2) throw std::invalid_argument("table needs matching t and a columns");
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1])) throw std::invalid_argument("table times must increase");
  RegimeSpec r;
  r.shape = Shape::table;
  r.ts = std::move(ts);
  r.as = std::move(as);
  return r;
}

double RegimeSpec::at(double t) const {
  switch (shape) {
    case Shape::zero_after:
      return t >= t0 ? 0.0 : c;
    case Shape::power:
      return c * std::pow(t, exponent);
    case Shape::exponential:
      return c * std::exp(exponent * t);
    case Shape::table: {
      if (t <= ts.front()) return as.front();
      if (t >= ts.back()) return as.back();
      auto it = std::upper_bound(ts.begin(), ts.end(), t);
      std::size_t i = static_cast<std::size_t>(it - ts.begin());
      double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
      return as[i - 1] + w * (as[i] - as[i - 1]);
    }
  }
  return 0.0;
}

std::string RegimeSpec::describe() const {
  std::ostringstream os;
  switch (shape) {
    case Shape::zero_after:
      os << "zero after " << t0;
      break;
    case Shape::power:
      os << c << "*t^" << exponent;
      break;
    case Shape::exponential:
      os << c << "*exp(" << exponent << "*t)";
      break;
    case Shape::table:
      os << "table(" << ts.size() << ")";
      break;
  }
  return os.str();
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::extinction:
      return "extinction";
    case Regime::kesten:
      return "kesten";
    case Regime::poisson:
      return "poisson";
    case Regime::high:
      return "high";
  }
  return "?";
}

namespace conditioning {

namespace {

constexpr double kExpTol = 1e-9;

double log_entrance(const ModelParams& p, double s, double x) {
  return std::log(analytics::c_t(p, s) * analytics::c_tilde_t(p, s)) - analytics::c_tilde_t(p, s) * x;
}

RegimeClass classify_power(double c, double pw, const ModelParams& p) {
  if (p.theta != 0.0) return {Regime::kesten, 0.0};
  if (pw < 2.0 - kExpTol) return {Regime::kesten, 0.0};
  if (pw > 2.0 + kExpTol) return {Regime::high, 0.0};
  return {Regime::poisson, c / (p.beta * p.beta)};
}

RegimeClass classify_exponential(double c, double r, const ModelParams& p) {
  if (p.theta == 0.0) return r > kExpTol ? RegimeClass{Regime::high, 0.0} : RegimeClass{Regime::kesten, 0.0};
  double crit = 2.0 * p.beta * std::fabs(p.theta);
  if (r < crit * (1.0 - kExpTol)) return {Regime::kesten, 0.0};
  if (r > crit * (1.0 + kExpTol)) return {Regime::high, 0.0};
  return {Regime::poisson, c * 4.0 * p.theta * p.theta};
}

// c_t - c_T without cancellation, t < T.
double c_diff(const ModelParams& p, double t, double T) {
  double r = 2.0 * p.beta * p.theta;
  if (r == 0.0) return 1.0 / (p.beta * t) - 1.0 / (p.beta * T);
  return 2.0 * p.theta * std::exp(r * t) * std::expm1(r * (T - t)) / (std::expm1(r * t) * std::expm1(r * T));
}

}  // namespace

double conditional_laplace_At(const ModelParams& p, double lambda, double s, double t, double a,
                              const QuadratureSpec& spec) {
  if (!(s > 0.0) || !(t > 0.0) || !(a > 0.0) || lambda < 0.0)
    throw DomainError("conditional_laplace_At domain");
  // transition density times entrance at s over entrance at s+t, with the
  // large a*c~ terms cancelled by hand: c~_t - c~_{s+t} = c_t - c_{s+t}
  double c = analytics::c_t(p, t), ct = analytics::c_tilde_t(p, t);
  double cst = analytics::c_tilde_t(p, s);
  double base = std::log(analytics::c_t(p, s) * cst * c * ct) -
                std::log(analytics::c_t(p, s + t) * analytics::c_tilde_t(p, s + t)) -
                a * c_diff(p, t, s + t);
  double k = a * c * ct;
  auto f = [&](double x) {
    if (!(x > 0.0)) return 0.0;
    return std::exp(base + std::log(x) - (cst + lambda + c) * x + analytics::log_bessel_series(k * x));
  };
  return quad::integrate_halfline(f, spec);
}

double conditional_laplace_At_closed(const ModelParams& p, double lambda, double s, double t, double a) {
  double cs = analytics::c_t(p, s), cts = analytics::c_tilde_t(p, s);
  double c = analytics::c_t(p, t), ct = analytics::c_tilde_t(p, t);
  double cT = analytics::c_t(p, s + t), ctT = analytics::c_tilde_t(p, s + t);
  double b = cts + lambda + c;
  double k = a * c * ct;
  double lg = std::log(c * ct / (cT * ctT)) - a * c_diff(p, t, s + t) + std::log(cs * cts) -
              2.0 * std::log(b) + k / b;
  return std::exp(lg);
}

double conditional_extinction_At(const ModelParams& p, double lambda, double s, double t,
                                 const QuadratureSpec& spec) {
  if (!(s > 0.0) || !(t > 0.0) || lambda < 0.0) throw DomainError("conditional_extinction_At domain");
  double c = analytics::c_t(p, t);
  auto f = [&](double x) {
    return -std::expm1(-lambda * x) * std::exp(log_entrance(p, s, x) - c * x);
  };
  return quad::integrate_halfline(f, spec);
}

RegimeClass classify(const RegimeSpec& spec, const ModelParams& p) {
  switch (spec.shape) {
    case RegimeSpec::Shape::zero_after:
      return {Regime::extinction, 0.0};
    case RegimeSpec::Shape::power:
      return classify_power(spec.c, spec.exponent, p);
    case RegimeSpec::Shape::exponential:
      return classify_exponential(spec.c, spec.exponent, p);
    case RegimeSpec::Shape::table: {
      // growth read off the last two entries
      std::size_t k = spec.ts.size();
      double t1 = spec.ts[k - 2], t2 = spec.ts[k - 1], a1 = spec.as[k - 2], a2 = spec.as[k - 1];
      if (a2 == 0.0) return {Regime::extinction, 0.0};
      if (!(a1 > 0.0 && a2 > 0.0)) throw DomainError("table levels must be positive or end at zero");
      if (p.theta == 0.0) {
        double pw = std::log(a2 / a1) / std::log(t2 / t1);
        return classify_power(a2 / std::pow(t2, pw), pw, p);
      }
      double r = std::log(a2 / a1) / (t2 - t1);
      return classify_exponential(a2 * std::exp(-r * t2), r, p);
    }
  }
  return {Regime::high, 0.0};
}

double limit_value(const ModelParams& p, const RegimeClass& regime, double lambda, double s) {
  ModelParams q = p.with_theta(std::fabs(p.theta));
  switch (regime.regime) {
    case Regime::poisson:
      return analytics::biased_laplace_poisson(q.with_alpha(regime.alpha), s, lambda);
    case Regime::kesten:
      return analytics::biased_laplace_kesten(q, s, lambda);
    case Regime::extinction:
      return analytics::u(q, lambda, s);
    case Regime::high:
      break;
  }
  throw UnsupportedRegime("high regime: the limit is an open problem");
}

std::vector<ConvergenceRow> convergence_experiment(const ModelParams& p, const RegimeSpec& spec,
                                                   double lambda, double s,
                                                   const std::vector<double>& t_grid, int jobs,
                                                   const QuadratureSpec& qspec) {
  RegimeClass rc = classify(spec, p);
  double lim = limit_value(p, rc, lambda, s);
  for (double t : t_grid)
    if (!(t > s)) throw DomainError("conditioning time must exceed s");
  std::vector<ConvergenceRow> rows(t_grid.size());
  stats::parallel_for(t_grid.size(), jobs, [&](std::size_t i) {
    double t = t_grid[i];
    ConvergenceRow& r = rows[i];
    r.t = t;
    r.a = spec.at(t);
    r.At = rc.regime == Regime::extinction ? conditional_extinction_At(p, lambda, s, t - s, qspec)
                                           : conditional_laplace_At(p, lambda, s, t - s, r.a, qspec);
    r.limit = lim;
    r.abs_err = std::fabs(r.At - lim);
    r.rel_err = r.abs_err / std::fabs(lim);
  });
  return rows;
}

std::size_t monotone_threshold(const std::vector<ConvergenceRow>& rows) {
  if (rows.empty()) return 0;
  std::size_t i = rows.size() - 1;
  while (i > 0 && rows[i].abs_err <= rows[i - 1].abs_err) --i;
  return i;
}

}  // namespace conditioning
}  // namespace csbp
