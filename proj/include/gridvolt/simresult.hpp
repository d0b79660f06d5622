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

#ifndef GRIDVOLT_SIMRESULT_HPP
#define GRIDVOLT_SIMRESULT_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridvolt/netmodel.hpp"

namespace gv {

/// Aggregate metrics of one run. Deviations are ||V| - 1| over non-slack
/// nodes and all steps; unbalance is the max pairwise phase-magnitude
/// difference per bus and step; violation minutes count node-minutes with
/// |V| outside [0.95, 1.05].
struct Metrics {
  double mean_abs_dev = 0.0;
  double max_abs_dev = 0.0;
  long total_tap_ops = 0;
  double mean_unbalance = 0.0;
  double max_unbalance = 0.0;
  double over_voltage_node_minutes = 0.0;
  double under_voltage_node_minutes = 0.0;
  int degraded_steps = 0;
  double max_pf_mismatch = 0.0;
};

struct SimulationResult {
  int steps = 0;
  double dt_s = 30.0;
  std::string method;
  std::vector<std::string> node_names;
  std::vector<std::string> oltc_ids;
  std::vector<std::string> unit_ids;
  std::vector<bool> slack_mask;
  std::vector<std::pair<int, int>> bus_node_spans;  // [first, last] per bus
  Eigen::MatrixXd vmag;        // steps x N, realized magnitudes
  Eigen::MatrixXd vmag_pred;   // steps x N for OVR runs, else 0 x 0
  Eigen::MatrixXi taps;        // steps x n_oltc
  Eigen::MatrixXd si_q_kvar;   // steps x n_units
  std::vector<int> degraded_step_list;
  double max_pf_mismatch = 0.0;
  Metrics metrics;
};

/// Recomputes every aggregate from the per-step data.
Metrics compute_metrics(const SimulationResult& r);

/// Tap operations of one trajectory per the transition count
/// sum_t |tau_t - tau_{t-1}|.
long tap_operations(const Eigen::VectorXi& trajectory);

/// Writes voltages.csv, taps.csv, si_q.csv, metrics.json, summary.txt.
void write_result_dir(const SimulationResult& r, const std::string& dir);

/// Reads back a metrics.json written by write_result_dir.
Metrics read_metrics_json(const std::string& path);

}  // namespace gv

#endif  // GRIDVOLT_SIMRESULT_HPP
