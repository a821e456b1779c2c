// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace boltz {

struct ToolboxCheck {
  std::string name;
  bool pass = true;
  std::string violation;  // the offending instance, when pass is false
  std::map<std::string, double> details;
};

struct ToolboxConfig {
  std::uint64_t seed = 7;
  int sandwich_samples = 10000;
  std::vector<double> a_values = {1.5, 2.0, 3.0};
  std::vector<double> lambda_values = {10.0, 100.0, 1000.0};
};

/// The full analytical-inequality sweep: fractional binomial sandwich, beta
/// sum bounds, angular cutoff remainder properties (hard-sphere benchmark),
/// ODE comparison against an integration oracle, and the stationary phase
/// ratios. Every check encodes a proved inequality; failures indicate
/// implementation bugs.
std::vector<ToolboxCheck> run_toolbox_sweep(const ToolboxConfig& config);

}  // namespace boltz
