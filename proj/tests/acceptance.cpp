// One line per acceptance criterion. Tolerances live in the suites; wall-clock
// budgets are pinned here. Exit status is 1 when any criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "csbp/verify.hpp"

using namespace csbp::verify;

namespace {

struct Criterion {
  int id;
  std::string suite;
  double budget_s;  // 0: no budget
};

const std::vector<Criterion> kCriteria = {
    {1, "analytics", 10},  {2, "moments", 60},     {3, "martingales", 60}, {4, "zalpha", 0},
    {5, "graft-lemma", 300}, {6, "bt-identity", 0}, {7, "bismut", 0},       {8, "taq", 0},
    {9, "limits", 60},     {10, "trees", 30},      {11, "metric", 120},
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string failed_names(const SuiteReport& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (!c.pass) s += (s.empty() ? "" : ",") + c.name;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  if (argc > 1) opt.seed = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) opt.jobs = std::atoi(argv[2]);
  std::setvbuf(stdout, nullptr, _IOLBF, 0);

  int failures = 0;
  std::map<std::string, std::string> first;
  for (const auto& c : kCriteria) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport r = run_suite(c.suite, opt);
    double secs = seconds_since(t0);
    first[c.suite] = r.dump();
    bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    bool ok = r.pass() && in_time;
    failures += !ok;
    std::printf("criterion %2d %-12s %s  checks=%zu  %.1fs", c.id, c.suite.c_str(), ok ? "PASS" : "FAIL",
                r.checks.size(), secs);
    if (c.budget_s > 0) std::printf(" (budget %.0fs)", c.budget_s);
    if (!r.pass()) std::printf("  failed: %s", failed_names(r).c_str());
    std::printf("\n");
  }

  // 12: same seed, same bytes. Full-size rerun of 1..11, plus the small-scale
  // determinism suite which also varies the thread count.
  auto t0 = std::chrono::steady_clock::now();
  std::string diff;
  for (const auto& c : kCriteria)
    if (run_suite(c.suite, opt).dump() != first[c.suite]) diff += (diff.empty() ? "" : ",") + c.suite;
  SuiteReport det = run_suite("determinism", opt);
  bool ok = diff.empty() && det.pass();
  failures += !ok;
  std::printf("criterion 12 %-12s %s  rerun_differs=[%s]  jobs_check=%s  %.1fs\n", "determinism",
              ok ? "PASS" : "FAIL", diff.c_str(), det.pass() ? "ok" : failed_names(det).c_str(),
              seconds_since(t0));
  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
