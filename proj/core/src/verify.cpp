#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "verify_detail.hpp"

namespace csbp::verify {

namespace detail {

std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix64(seed ^ mix64(h));
}

std::size_t scaled(std::size_t n, const Options& o, std::size_t floor) {
  double v = std::round(static_cast<double>(n) * o.scale);
  return std::max(floor, static_cast<std::size_t>(std::max(0.0, v)));
}

std::size_t mc_samples(std::size_t n, const Options& o) { return o.samples ? o.samples : scaled(n, o); }

skeleton::McOptions mc(const Options& o, std::size_t n) {
  skeleton::McOptions m;
  m.samples = mc_samples(n, o);
  m.chunks = 64;
  m.jobs = o.jobs;
  return m;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

json report_json(const stats::TestReport& r) {
  return json::parse(r.to_json());
}

Check mc_check(const std::string& name, const stats::TestReport& r, double zmax) {
  Check c;
  c.name = name;
  c.data = report_json(r);
  c.data["zmax"] = zmax;
  c.pass = std::isfinite(r.z) && std::fabs(r.z) < zmax;
  return c;
}

Check tol_check(const std::string& name, double err, double tol, json extra) {
  Check c;
  c.name = name;
  c.data = std::move(extra);
  c.data["error"] = err;
  c.data["tolerance"] = tol;
  c.pass = std::isfinite(err) && err <= tol;
  return c;
}

Check p_check(const std::string& name, double stat, double p, double pmin, json extra) {
  Check c;
  c.name = name;
  c.data = std::move(extra);
  c.data["statistic"] = stat;
  c.data["p"] = p;
  c.data["pmin"] = pmin;
  c.pass = std::isfinite(p) && p > pmin;
  return c;
}

Check count_check(const std::string& name, std::size_t failures, std::size_t total, json extra) {
  Check c;
  c.name = name;
  c.data = std::move(extra);
  c.data["failures"] = failures;
  c.data["instances"] = total;
  c.pass = failures == 0 && total > 0;
  return c;
}

namespace {

SuiteReport suite_determinism(const Options& o);

using SuiteFn = std::function<SuiteReport(const Options&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r = {
      {"analytics", suite_analytics},     {"moments", suite_moments},
      {"martingales", suite_martingales}, {"zalpha", suite_zalpha},
      {"graft-lemma", suite_graft_lemma}, {"bt-identity", suite_bt_identity},
      {"bismut", suite_bismut},           {"taq", suite_taq},
      {"limits", suite_limits},           {"trees", suite_trees},
      {"metric", suite_metric},           {"determinism", suite_determinism},
      {"samplers-props", suite_samplers_props}, {"skeleton-props", suite_skeleton_props},
      {"decorate-props", suite_decorate_props},
  };
  return r;
}

SuiteReport suite_determinism(const Options& o) {
  SuiteReport rep;
  Options small = o;
  small.scale = 0.01 * o.scale;
  small.samples = 0;
  Options other = small;
  other.jobs = o.jobs == 3 ? 2 : 3;
  for (const auto& [name, fn] : registry()) {
    if (name == "determinism") continue;
    std::string a = fn(small).to_json().dump();
    std::string b = fn(small).to_json().dump();
    std::string c = fn(other).to_json().dump();
    Check k;
    k.name = name;
    k.data["bytes"] = a.size();
    k.data["fingerprint"] = sub_seed(0, a);
    k.data["jobs"] = json::array({small.jobs, other.jobs});
    k.pass = a == b && a == c;
    rep.checks.push_back(std::move(k));
  }
  return rep;
}

}  // namespace
}  // namespace detail

bool SuiteReport::pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::ordered_json SuiteReport::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["criterion"] = criterion;
  j["pass"] = pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["data"] = c.data;
    j["checks"].push_back(std::move(e));
  }
  return j;
}

std::string SuiteReport::dump() const { return to_json().dump(2) + "\n"; }

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : detail::registry()) v.push_back(e.first);
    return v;
  }();
  return names;
}

int criterion_of(const std::string& suite) {
  const auto& n = suite_names();
  auto it = std::find(n.begin(), n.end(), suite);
  if (it == n.end()) return 0;
  int i = static_cast<int>(it - n.begin()) + 1;
  return i <= 12 ? i : 0;
}

namespace {

const std::map<std::string, std::vector<std::string>>& modules() {
  static const std::map<std::string, std::vector<std::string>> m = {
      {"samplers", {"moments", "martingales", "zalpha", "samplers-props"}},
      {"skeleton", {"graft-lemma", "bt-identity", "skeleton-props"}},
      {"decorate", {"bismut", "taq", "decorate-props"}},
      {"conditioning", {"limits"}},
  };
  return m;
}

}  // namespace

std::vector<std::string> target_names() {
  std::vector<std::string> v = suite_names();
  for (const auto& [k, s] : modules()) v.push_back(k);
  v.push_back("all");
  return v;
}

std::vector<std::string> expand_target(const std::string& target) {
  if (target == "all") {
    std::vector<std::string> v = suite_names();
    v.erase(std::remove(v.begin(), v.end(), "determinism"), v.end());
    v.push_back("determinism");
    return v;
  }
  auto m = modules().find(target);
  if (m != modules().end()) return m->second;
  const auto& n = suite_names();
  if (std::find(n.begin(), n.end(), target) != n.end()) return {target};
  throw std::invalid_argument("unknown verify target '" + target + "'");
}

SuiteReport run_suite(const std::string& suite, const Options& opt) {
  for (const auto& [name, fn] : detail::registry()) {
    if (name != suite) continue;
    SuiteReport r = fn(opt);
    r.suite = name;
    r.criterion = criterion_of(name);
    return r;
  }
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

}  // namespace csbp::verify
