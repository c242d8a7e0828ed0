#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace csbp::verify {

struct Options {
  std::uint64_t seed = 1;
  int jobs = 1;
  double scale = 1.0;        // multiplies every sample and instance count
  std::size_t samples = 0;   // per-side MC sample count override when non-zero
  int only_n = 0;            // restricts the n-indexed suites to this n
};

struct Check {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json data;
};

struct SuiteReport {
  std::string suite;
  int criterion = 0;  // 0 for the module property suites
  std::vector<Check> checks;

  bool pass() const;
  nlohmann::ordered_json to_json() const;
  std::string dump() const;  // the report file contents
};

// Criterion suites in order 1..12, then the extra module property suites.
const std::vector<std::string>& suite_names();
int criterion_of(const std::string& suite);
// Names accepted by `verify`: suites, module names and "all".
std::vector<std::string> target_names();
// Suites behind a target; throws std::invalid_argument on unknown names.
std::vector<std::string> expand_target(const std::string& target);

SuiteReport run_suite(const std::string& suite, const Options& opt);

}  // namespace csbp::verify
