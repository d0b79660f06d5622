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

#ifndef GRIDVOLT_MILP_HPP
#define GRIDVOLT_MILP_HPP

#include <optional>
#include <string>
#include <vector>

#include "gridvolt/linmodel.hpp"
#include "gridvolt/lp.hpp"

namespace gv {

/// Tap-schedule description of one OLTC inside a dispatch horizon.
struct OltcScheduleSpec {
  std::string id;
  int tau_min = -16;
  int tau_max = 16;
  double a_max = 1.1;
  int delta_to_max = 1;          // max |tap move| between consecutive steps
  std::optional<int> tau_prev;   // position entering the horizon; empty on a
                                 // cold start (first move is free and uncounted)
};

/// Horizon dispatch instance: linearized physics per step plus device data.
/// Node indices are in the full node space of the feeder the sensitivity
/// models were built on.
struct DispatchProblem {
  int n_steps = 0;
  double dt_s = 30.0;
  std::vector<SensitivityModel> sens;  // one per step
  std::vector<int> load_nodes;         // fixed-power nodes without PV
  std::vector<int> pv_nodes;           // nodes carrying SI reactive dispatch
  Eigen::MatrixXd q_max_pu;            // n_steps x |pv_nodes|
  std::vector<OltcScheduleSpec> oltcs;
  double w1 = 1.0;
  double w2 = 0.15;
  // box safeguards keeping every physical variable bounded
  double dv_box = 0.5;
  double di_box = 10.0;
};

/// Assembled LP relaxation plus the column/row bookkeeping needed to read a
/// solution back out. Column order: per-step physics blocks
/// [dVd | dVq | dId | dIq], then tap ratios a_{p,t}, integer taps tau_{p,t},
/// deviation auxiliaries d_{i,t}, move auxiliaries m_{p,t}.
struct AssembledDispatch {
  lp::LpInstance lp;
  int n_steps = 0;
  int nr = 0;  // non-slack node count
  std::vector<int> r2f;

  int col_dvd(int t, int k) const { return t * 4 * nr + k; }
  int col_dvq(int t, int k) const { return t * 4 * nr + nr + k; }
  int col_did(int t, int k) const { return t * 4 * nr + 2 * nr + k; }
  int col_diq(int t, int k) const { return t * 4 * nr + 3 * nr + k; }
  int a_col(int p, int t) const { return a_base + p * n_steps + t; }
  int tau_col(int p, int t) const { return tau_base + p * n_steps + t; }
  int d_col(int t, int k) const { return d_base + t * nr + k; }
  int m_col(int p, int t) const { return m_base + p * n_steps + t; }

  int a_base = 0, tau_base = 0, d_base = 0, m_base = 0;
  int n_oltc = 0;
  std::vector<int> dq_row;  // row index of each (t, pv) reactive expression
  int dq_row_at(int t, int pv) const {
    return dq_row[t * n_pv + pv];
  }
  int n_pv = 0;
};

/// Builds the LP relaxation with integer marks on the tau columns:
/// voltage equality rows (in admittance form, split re/im), linearized
/// fixed-power and PV constraints, the affine voltage-magnitude relation
/// feeding deviation auxiliaries, tap-ratio links, ramp rows, and move
/// auxiliaries. Throws on empty horizons or dimension mismatches.
AssembledDispatch assemble(const DispatchProblem& problem);

struct DispatchSolution {
  std::vector<std::vector<int>> tap_schedule;  // [oltc][step]
  Eigen::MatrixXd si_dq_pu;    // n_steps x |pv_nodes|, reactive dispatch
  Eigen::MatrixXd vmag_pred;   // n_steps x N (full node space)
  double objective = 0.0;
  double j1 = 0.0;             // sum of predicted |V| deviations from 1
  double j2 = 0.0;             // tap operations incl. the move from tau_prev
  double gap = 0.0;
  std::string status;          // "optimal" | "budget" | "fallback"
  int bb_nodes = 0;
  long lp_iterations = 0;
  Eigen::VectorXd lp_x;        // raw column values of the incumbent
};

/// Abstract LP engine behind the branch-and-bound; the built-in simplex is
/// the default. Implementations must be deterministic.
class LpBackend {
 public:
  virtual ~LpBackend() = default;
  virtual lp::LpSolution solve(const lp::LpInstance& lp,
                               const lp::Basis* warm) = 0;
};

struct MilpOptions {
  double time_budget_s = 60.0;
  double rel_gap = 1e-6;
  double int_tol = 1e-6;
  LpBackend* backend = nullptr;       // null: built-in simplex
  std::string log_csv_path;           // optional per-node solver log
};

/// Best-bound branch-and-bound on the tau columns over the LP relaxation.
/// Branching picks the most-fractional tau (ties: lowest (p, t)). Always
/// returns an incumbent: the tau = tau_prev hold schedule is solved first as
/// a fallback. Deterministic for fixed inputs when the budget does not bind.
DispatchSolution solve_milp(const DispatchProblem& problem,
                            const MilpOptions& opts = {});

/// Per-step commands for the plant: integer taps and per-unit reactive
/// set-points for every SI unit (kvar), split proportionally when several
/// units share a node and clipped to the unit capability with a counter of
/// clip events (clipping indicates a modeling error upstream).
struct StepCommands {
  std::vector<int> taps;            // per OLTC
  std::vector<double> q_set_kvar;   // per PV unit (model order)
};

struct SetpointExtraction {
  std::vector<StepCommands> steps;
  int clip_events = 0;
};

SetpointExtraction extract_setpoints(const DispatchSolution& sol,
                                     const DispatchProblem& problem,
                                     const FeederModel& model,
                                     const Eigen::MatrixXd& unit_qmax_kvar);

}  // namespace gv

#endif  // GRIDVOLT_MILP_HPP
