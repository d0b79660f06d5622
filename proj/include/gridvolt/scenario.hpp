// Copyright 2026 The gridvolt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GRIDVOLT_SCENARIO_HPP
#define GRIDVOLT_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridvolt/controllers.hpp"

namespace gv {

enum class Method { kAvr, kOvr };

/// Fully resolved run configuration. Paths are absolute after loading (the
/// loader resolves them against the scenario file's directory).
struct Scenario {
  std::string feeder_path;
  std::string profiles_dir;
  Method method = Method::kOvr;
  int steps = 0;             // 0: run the full profile length
  double dt_s = 30.0;
  int horizon_steps = 10;
  int replan_steps = 10;     // apply this many steps, then re-linearize
  double w1 = 1.0;
  double w2 = 0.15;
  double forecast_alpha = 0.0;
  std::uint64_t rng_seed = 1;
  VoltVarCurve volt_var = VoltVarCurve::recommended_default();
  AvrOltcSettings avr;
  double milp_time_budget_s = 20.0;
  std::optional<std::vector<int>> initial_taps;  // empty: cold start / settle
  std::optional<int> delta_to_max_override;      // per optimization step
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text,
                        const std::string& base_dir);

}  // namespace gv

#endif  // GRIDVOLT_SCENARIO_HPP
