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

#ifndef GRIDVOLT_TESTS_DISPATCH_FIXTURES_HPP
#define GRIDVOLT_TESTS_DISPATCH_FIXTURES_HPP

#include <optional>
#include <vector>

#include "gridvolt/milp.hpp"
#include "support/fixtures.hpp"

namespace gvtest {

inline gv::InjectionSpec device_injections(const gv::FeederModel& m,
                                           double pv_p_pu) {
  gv::InjectionSpec inj;
  inj.s_pu = Eigen::VectorXcd::Zero(m.n_nodes());
  for (const auto& ld : m.loads) {
    inj.s_pu[m.node_index(ld.bus, ld.phase)] -= gv::cdouble(ld.p_pu, ld.q_pu);
  }
  for (const auto& pv : m.pv_units) {
    inj.s_pu[m.node_index(pv.bus, pv.phase)] += gv::cdouble(pv_p_pu, 0.0);
  }
  return inj;
}

struct DispatchSetup {
  gv::FeederModel model;
  gv::DispatchProblem problem;
};

/// Dispatch problem over a fixture feeder: base flow at `taps0`, `horizon`
/// copies of the sensitivity model, uniform PV Q headroom `qmax_pu`.
inline DispatchSetup make_dispatch(const std::string& feeder_json,
                                   std::vector<int> taps0, int horizon,
                                   double qmax_pu, double w1, double w2,
                                   std::optional<int> tau_prev, int tau_range,
                                   int delta_to_max, double pv_p_pu = 0.05) {
  DispatchSetup s{gv::parse_feeder(feeder_json), {}};
  auto& m = s.model;
  auto tr = gv::TapRatioSet::from_taps(m, taps0);
  auto y = gv::assemble_ybus(m, tr);
  auto op = gv::solve_powerflow(m, y, device_injections(m, pv_p_pu));
  if (!op.converged) throw gv::PowerFlowError("fixture power flow failed");
  auto sm = gv::build_sensitivity(m, y, op);

  auto& p = s.problem;
  p.n_steps = horizon;
  p.sens.assign(horizon, sm);
  std::vector<bool> has_pv(m.n_nodes(), false);
  for (const auto& pv : m.pv_units) {
    const int n = m.node_index(pv.bus, pv.phase);
    if (!has_pv[n]) {
      has_pv[n] = true;
      p.pv_nodes.push_back(n);
    }
  }
  for (const auto& ld : m.loads) {
    const int n = m.node_index(ld.bus, ld.phase);
    if (!has_pv[n]) p.load_nodes.push_back(n);
  }
  p.q_max_pu = Eigen::MatrixXd::Constant(horizon, p.pv_nodes.size(), qmax_pu);
  for (size_t i = 0; i < m.oltcs.size(); ++i) {
    gv::OltcScheduleSpec spec;
    spec.id = m.oltcs[i].id;
    spec.tau_min = -tau_range;
    spec.tau_max = tau_range;
    spec.a_max = 1.0 + 0.1 * tau_range / 16.0;  // keep the 1/160 per-tap slope
    spec.delta_to_max = delta_to_max;
    spec.tau_prev = tau_prev;
    p.oltcs.push_back(spec);
  }
  p.w1 = w1;
  p.w2 = w2;
  return s;
}

/// Exhaustive oracle: enumerates every ramp-feasible integer tap schedule,
/// solves the LP with taps fixed, and returns the best objective.
inline double enumerate_dispatch_best(const gv::DispatchProblem& prob) {
  gv::AssembledDispatch a = gv::assemble(prob);
  const int T = a.n_steps;
  const int P = a.n_oltc;
  const int n_tau = P * T;

  std::vector<int> lo(n_tau), hi(n_tau);
  for (int i = 0; i < n_tau; ++i) {
    lo[i] = static_cast<int>(a.lp.col_lb[a.tau_base + i]);
    hi[i] = static_cast<int>(a.lp.col_ub[a.tau_base + i]);
  }

  double best = gv::lp::kInf;
  std::vector<int> tau(n_tau, 0);

  // depth-first over (p, t) in row-major order with ramp feasibility
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n_tau) {
      for (int i = 0; i < n_tau; ++i) {
        a.lp.col_lb[a.tau_base + i] = tau[i];
        a.lp.col_ub[a.tau_base + i] = tau[i];
      }
      auto sol = gv::lp::solve_lp(a.lp);
      if (sol.status == gv::lp::LpStatus::kOptimal) {
        best = std::min(best, sol.objective);
      }
      return;
    }
    const int p = pos / T, t = pos % T;
    const auto& d = prob.oltcs[p];
    int from_lo = lo[pos], from_hi = hi[pos];
    if (t == 0) {
      if (d.tau_prev) {
        from_lo = std::max(from_lo, *d.tau_prev - d.delta_to_max);
        from_hi = std::min(from_hi, *d.tau_prev + d.delta_to_max);
      }
    } else {
      from_lo = std::max(from_lo, tau[pos - 1] - d.delta_to_max);
      from_hi = std::min(from_hi, tau[pos - 1] + d.delta_to_max);
    }
    for (int v = from_lo; v <= from_hi; ++v) {
      tau[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  return best;
}

}  // namespace gvtest

#endif  // GRIDVOLT_TESTS_DISPATCH_FIXTURES_HPP
