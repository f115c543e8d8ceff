#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlspace/battery.hpp"
#include "vlspace/domain.hpp"

namespace vls {

struct SuiteConfig {
  std::uint64_t seed = 42;
  int n = 1;
  Index cells = 128;  // per axis
  Index half_width = 1;
  int d = 2;
  std::size_t exponent_count = 10;
  std::size_t weight_count = 12;
  std::size_t random_cases = 200;  // base size of the randomised checks
  std::size_t direction_count = 0;  // 0: default for d
  bool allow_d3 = false;
  /// Check ids to run, in canonical order; nullopt runs every check.
  std::optional<std::vector<std::string>> suites;
};

struct CheckRecord {
  std::string id;
  std::string lemma;  // name of the inequality
  std::string quote;  // the inequality in plain notation
  bool hard = true;
  std::size_t n_cases = 0;
  std::size_t n_pass = 0;
  double worst_margin = INFINITY;  // relative slack of the tightest case; < 0 means violated
  std::string witness;
  std::map<std::string, double> observations;
  double seconds = 0.0;

  bool passed() const { return !hard || n_pass == n_cases; }
};

struct SuiteReport {
  SuiteConfig config;
  std::vector<CheckRecord> checks;
  bool pass = true;
  double seconds = 0.0;
};

/// All check ids in execution order.
const std::vector<std::string>& suite_ids();

/// Box [-L, L)^n with `cells` cells per axis.
LatticeDomain suite_domain(const SuiteConfig& config);

/// Runs the selected checks. Module errors become failed cases with the
/// error message as witness; the run continues.
SuiteReport run_suite(const SuiteConfig& config);

/// JSON report. Without timing the output is a pure function of the config.
std::string report_json(const SuiteReport& report, bool include_timing = true);

}  // namespace vls
