#pragma once

#include "qg/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qg {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_most = true;  // value <= threshold, else value >= threshold
  bool pass = false;
};

// Least-squares slope of log(value) against log(h). When every sample sits
// below the floor the quantity is at roundoff and the order is reported as
// infinite.
struct OrderFit {
  std::string name;
  std::vector<int> grids;
  std::vector<double> h;
  std::vector<double> values;
  double order = 0.0;
  double floor = 1e-9;
  bool at_floor = false;
};

OrderFit fit_order(std::string name, const std::vector<int>& grids, const std::vector<double>& h,
                   const std::vector<double>& values, double floor = 1e-9);

struct SuiteReport {
  std::string suite;
  bool pass = false;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<OrderFit> orders;
  std::vector<Check> checks;

  const Check* check(const std::string& name) const;
  double metric(const std::string& name) const;
};

struct SuiteConfig {
  std::vector<int> grids{32, 64, 128};
  std::uint64_t seed = 20240611;
  cplx lambda{2.0, 0.0};
  int group_elements = 20;
  int descent_steps = 50;
  int descent_grid = 48;
  double descent_step = 4e-3;
  std::map<std::string, double> thresholds;  // overrides by check name
  std::optional<double> tolerance;           // overrides the first check of the suite
};

const std::vector<std::string>& suite_names();

// Throws invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg = {});

}  // namespace qg
