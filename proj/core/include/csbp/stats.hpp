#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "csbp/rng.hpp"

namespace csbp::stats {

// Welford accumulator, mergeable in a fixed order.
struct Running {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const Running& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se() const;
};

// Joint accumulator for a pair; used for ratio and difference estimators.
struct RunningPair {
  Running a, b;
  double cab = 0.0;  // co-moment
  void add(double x, double y);
  void merge(const RunningPair& o);
  double covariance() const;
};

struct TestReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  double z = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

TestReport make_report(const Running& lhs, const Running& rhs, std::uint64_t seed);
TestReport make_report_exact(const Running& lhs, double rhs, std::uint64_t seed);

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

double kolmogorov_q(double lambda);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

struct Chi2Result {
  double stat = 0.0;
  int dof = 0;
  double p = 1.0;
};

// Bins with expected count below min_expected are pooled into their neighbour.
Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected,
                     double min_expected = 5.0, int constraints = 1);
// Contingency-table independence test.
Chi2Result chi2_independence(const std::vector<std::vector<double>>& table);

// Splits [0,n) into `chunks` contiguous ranges, each with stream root.split(chunk),
// runs them on up to `jobs` threads and returns per-chunk results in chunk order.
template <class R>
std::vector<R> run_chunks(std::size_t n, std::size_t chunks, int jobs, const RandomStream& root,
                          const std::function<R(std::size_t, RandomStream&, std::size_t, std::size_t)>& fn);

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace csbp::stats

#include "csbp/stats_impl.hpp"
