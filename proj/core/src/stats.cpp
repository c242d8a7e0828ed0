#include "csbp/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <thread>

namespace csbp::stats {

void Running::add(double x) {
  ++n;
  double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void Running::merge(const Running& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  double d = o.mean - mean;
  double tot = na + nb;
  mean += d * nb / tot;
  m2 += o.m2 + d * d * na * nb / tot;
  n += o.n;
}

double Running::se() const {
  return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
}

void RunningPair::add(double x, double y) {
  double dx = x - a.mean;
  a.add(x);
  b.add(y);
  cab += dx * (y - b.mean);
}

void RunningPair::merge(const RunningPair& o) {
  if (o.a.n == 0) return;
  if (a.n == 0) {
    *this = o;
    return;
  }
  double na = static_cast<double>(a.n), nb = static_cast<double>(o.a.n);
  double tot = na + nb;
  double dx = o.a.mean - a.mean;
  double dy = o.b.mean - b.mean;
  cab += o.cab + dx * dy * na * nb / tot;
  a.merge(o.a);
  b.merge(o.b);
}

double RunningPair::covariance() const {
  return a.n > 1 ? cab / static_cast<double>(a.n - 1) : 0.0;
}

std::string TestReport::to_json() const {
  nlohmann::ordered_json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["se_lhs"] = se_lhs;
  j["se_rhs"] = se_rhs;
  j["z"] = z;
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  return j.dump();
}

static double zscore(double l, double r, double sl, double sr) {
  double s = std::sqrt(sl * sl + sr * sr);
  if (s == 0.0) return l == r ? 0.0 : std::numeric_limits<double>::infinity();
  return (l - r) / s;
}

TestReport make_report(const Running& lhs, const Running& rhs, std::uint64_t seed) {
  TestReport t;
  t.lhs = lhs.mean;
  t.rhs = rhs.mean;
  t.se_lhs = lhs.se();
  t.se_rhs = rhs.se();
  t.z = zscore(t.lhs, t.rhs, t.se_lhs, t.se_rhs);
  t.n_samples = std::max(lhs.n, rhs.n);
  t.seed = seed;
  return t;
}

TestReport make_report_exact(const Running& lhs, double rhs, std::uint64_t seed) {
  TestReport t;
  t.lhs = lhs.mean;
  t.rhs = rhs;
  t.se_lhs = lhs.se();
  t.z = zscore(t.lhs, t.rhs, t.se_lhs, 0.0);
  t.n_samples = lhs.n;
  t.seed = seed;
  return t;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
  std::sort(a.begin(), a.end());
  double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double f = cdf(a[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  double ne = std::sqrt(n);
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                     double min_expected, int constraints) {
  std::vector<double> o, e;
  double co = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    co += observed[i];
    ce += expected[i];
    if (ce >= min_expected) {
      o.push_back(co);
      e.push_back(ce);
      co = ce = 0.0;
    }
  }
  if (ce > 0.0 || co > 0.0) {
    if (e.empty()) {
      o.push_back(co);
      e.push_back(ce);
    } else {
      o.back() += co;
      e.back() += ce;
    }
  }
  Chi2Result r;
  for (std::size_t i = 0; i < o.size(); ++i) r.stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  r.dof = static_cast<int>(o.size()) - constraints;
  if (r.dof < 1) {
    r.p = 1.0;
    return r;
  }
  boost::math::chi_squared dist(r.dof);
  r.p = boost::math::cdf(boost::math::complement(dist, r.stat));
  return r;
}

Chi2Result chi2_independence(const std::vector<std::vector<double>>& table) {
  std::size_t rows = table.size();
  std::size_t cols = rows ? table[0].size() : 0;
  std::vector<double> rs(rows, 0.0), cs(cols, 0.0);
  double tot = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      rs[i] += table[i][j];
      cs[j] += table[i][j];
      tot += table[i][j];
    }
  Chi2Result r;
  std::size_t nr = 0, nc = 0;
  for (double v : rs) nr += v > 0;
  for (double v : cs) nc += v > 0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double e = rs[i] * cs[j] / tot;
      if (e > 0.0) r.stat += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  r.dof = static_cast<int>((nr - 1) * (nc - 1));
  if (r.dof < 1) return r;
  boost::math::chi_squared dist(r.dof);
  r.p = boost::math::cdf(boost::math::complement(dist, r.stat));
  return r;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t k = static_cast<std::size_t>(std::max(1, jobs));
  if (k <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  k = std::min(k, count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < k; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += k) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace csbp::stats
