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

#ifndef GRIDVOLT_RUNNER_HPP
#define GRIDVOLT_RUNNER_HPP

#include <functional>
#include <string>
#include <vector>

#include "gridvolt/scenario.hpp"
#include "gridvolt/simresult.hpp"

namespace gv {

/// Quasi-steady-state timeline driver. AVR: autonomous devices on true
/// profiles. OVR: per horizon, base power flows on forecasts, sensitivity
/// build, dispatch MILP, commands applied on true profiles. Step failures
/// are recorded and the run continues on last-good controls.
SimulationResult run_scenario(const Scenario& s);

struct AlphaSweepRow {
  double alpha;
  double max_abs_dev;
  double mean_abs_dev;
};

/// One run per alpha with a shared seed; rows in input order.
std::vector<AlphaSweepRow> sweep_alpha(const Scenario& base,
                                       const std::vector<double>& alphas);

void write_sweep_csv(const std::vector<AlphaSweepRow>& rows,
                     const std::string& path);

struct LinValidation {
  double max_abs_err = 0.0;
  double mean_abs_err = 0.0;
  int steps = 0;
  SimulationResult result;  // the underlying OVR run
};

/// Runs the scenario as OVR and reports |predicted - realized| voltage
/// magnitudes over all non-slack nodes and applied steps.
LinValidation validate_linearization(const Scenario& s);

void write_linvalidation(const LinValidation& v, const std::string& dir);

/// Renders a side-by-side comparison of two result directories
/// (metrics.json of each).
std::string compare_result_dirs(const std::string& dir_a,
                                const std::string& dir_b);

}  // namespace gv

#endif  // GRIDVOLT_RUNNER_HPP
