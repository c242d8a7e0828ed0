#pragma once

#include <string>
#include <vector>

#include "csbp/skeleton.hpp"
#include "csbp/stats.hpp"
#include "csbp/verify.hpp"

namespace csbp::verify::detail {

using json = nlohmann::ordered_json;

std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag);
std::size_t scaled(std::size_t n, const Options& o, std::size_t floor = 100);
// per-side MC size: the override when set, else n scaled
std::size_t mc_samples(std::size_t n, const Options& o);
skeleton::McOptions mc(const Options& o, std::size_t n);

// short decimal form for check names
std::string num(double x);

json report_json(const stats::TestReport& r);
Check mc_check(const std::string& name, const stats::TestReport& r, double zmax = 3.0);
Check tol_check(const std::string& name, double err, double tol, json extra = json::object());
Check p_check(const std::string& name, double stat, double p, double pmin = 0.01, json extra = json::object());
Check count_check(const std::string& name, std::size_t failures, std::size_t total,
                  json extra = json::object());

// k running means over n draws; f(rs, out) writes k values per draw.
template <class F>
std::vector<stats::Running> mc_means(const Options& o, std::size_t n, std::uint64_t seed, std::size_t k, F f) {
  auto parts = stats::run_chunks<std::vector<stats::Running>>(
      n, 64, o.jobs, RandomStream(seed),
      [&](std::size_t, RandomStream& rs, std::size_t b, std::size_t e) {
        std::vector<stats::Running> acc(k);
        std::vector<double> v(k);
        for (std::size_t i = b; i < e; ++i) {
          f(rs, v.data());
          for (std::size_t j = 0; j < k; ++j) acc[j].add(v[j]);
        }
        return acc;
      });
  std::vector<stats::Running> out(k);
  for (const auto& part : parts)
    for (std::size_t j = 0; j < k; ++j) out[j].merge(part[j]);
  return out;
}

template <class F>
stats::Running mc_mean(const Options& o, std::size_t n, std::uint64_t seed, F f) {
  return mc_means(o, n, seed, 1, [&](RandomStream& rs, double* v) { v[0] = f(rs); })[0];
}

// n draws of T in chunk order.
template <class T, class F>
std::vector<T> mc_collect(const Options& o, std::size_t n, std::uint64_t seed, F f) {
  auto parts = stats::run_chunks<std::vector<T>>(
      n, 64, o.jobs, RandomStream(seed), [&](std::size_t, RandomStream& rs, std::size_t b, std::size_t e) {
        std::vector<T> v;
        v.reserve(e - b);
        for (std::size_t i = b; i < e; ++i) v.push_back(f(rs));
        return v;
      });
  std::vector<T> out;
  out.reserve(n);
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

SuiteReport suite_analytics(const Options& o);
SuiteReport suite_moments(const Options& o);
SuiteReport suite_martingales(const Options& o);
SuiteReport suite_zalpha(const Options& o);
SuiteReport suite_graft_lemma(const Options& o);
SuiteReport suite_bt_identity(const Options& o);
SuiteReport suite_bismut(const Options& o);
SuiteReport suite_taq(const Options& o);
SuiteReport suite_limits(const Options& o);
SuiteReport suite_trees(const Options& o);
SuiteReport suite_metric(const Options& o);
SuiteReport suite_samplers_props(const Options& o);
SuiteReport suite_skeleton_props(const Options& o);
SuiteReport suite_decorate_props(const Options& o);

}  // namespace csbp::verify::detail
