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

#include "gridvolt/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gv {

void VoltVarCurve::validate() const {
  if (breakpoints.size() < 2) {
    throw SchemaError("volt-var curve needs at least two breakpoints");
  }
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    if (breakpoints[i].second < -1.0 || breakpoints[i].second > 1.0) {
      throw SchemaError("volt-var q fraction outside [-1, 1]");
    }
    if (i > 0) {
      if (breakpoints[i].first <= breakpoints[i - 1].first) {
        throw SchemaError("volt-var breakpoints must be strictly increasing in V");
      }
      if (breakpoints[i].second > breakpoints[i - 1].second) {
        throw SchemaError("volt-var curve must be non-increasing in q");
      }
    }
  }
}

double VoltVarCurve::q_fraction(double v) const {
  if (v <= breakpoints.front().first) return breakpoints.front().second;
  if (v >= breakpoints.back().first) return breakpoints.back().second;
  for (size_t i = 1; i < breakpoints.size(); ++i) {
    if (v <= breakpoints[i].first) {
      const auto& [v0, q0] = breakpoints[i - 1];
      const auto& [v1, q1] = breakpoints[i];
      return q0 + (q1 - q0) * (v - v0) / (v1 - v0);
    }
  }
  return breakpoints.back().second;
}

VoltVarCurve VoltVarCurve::recommended_default() {
  VoltVarCurve c;
  c.breakpoints = {{0.92, 1.0}, {0.98, 0.0}, {1.02, 0.0}, {1.08, -1.0}};
  return c;
}

double volt_var_q(const VoltVarCurve& curve, double v_pcc, double q_max_kvar) {
  const double q = curve.q_fraction(v_pcc) * q_max_kvar;
  return std::clamp(q, -q_max_kvar, q_max_kvar);
}

double pv_q_capability_kvar(const PvUnit& unit, double p_kw) {
  const double p = std::min(std::abs(p_kw), unit.s_kva);
  return std::sqrt(std::max(0.0, unit.s_kva * unit.s_kva - p * p));
}

InjectionSpec build_injections(const FeederModel& model, const StepInputs& in,
                               const std::vector<double>& pv_q_kvar,
                               int* p_clip_events) {
  InjectionSpec inj;
  inj.s_pu = Eigen::VectorXcd::Zero(model.n_nodes());
  for (size_t i = 0; i < model.loads.size(); ++i) {
    const auto& ld = model.loads[i];
    inj.s_pu[model.node_index(ld.bus, ld.phase)] -=
        cdouble(in.load_p_pu[i], in.load_q_pu[i]);
  }
  for (size_t u = 0; u < model.pv_units.size(); ++u) {
    const auto& pv = model.pv_units[u];
    double p_kw = in.pv_p_kw[u];
    if (p_kw > pv.s_kva) {
      p_kw = pv.s_kva;  // inverter ceiling; curtailment is a model error
      if (p_clip_events) ++(*p_clip_events);
    }
    const double q_kvar = u < pv_q_kvar.size() ? pv_q_kvar[u] : 0.0;
    inj.s_pu[model.node_index(pv.bus, pv.phase)] +=
        cdouble(model.to_pu_power(p_kw), model.to_pu_power(q_kvar));
  }
  return inj;
}

namespace {

// Monitored voltage for an OLTC: mean |V| over its regulated secondary nodes.
double monitored_voltage(const FeederModel& model, const OltcDevice& dev,
                         const OperatingPoint& op) {
  double sum = 0.0;
  for (Phase ph : dev.phases) {
    sum += std::abs(op.v[model.node_index(dev.secondary_bus, ph)]);
  }
  return sum / static_cast<double>(dev.phases.size());
}

// Quantized controller state for oscillation detection.
std::vector<long> quantized_state(const std::vector<int>& taps,
                                  const std::vector<double>& q_kvar) {
  std::vector<long> key(taps.begin(), taps.end());
  for (double q : q_kvar) key.push_back(std::lround(q * 100.0));
  return key;
}

}  // namespace

AvrStepResult avr_step(const FeederModel& model, const AvrOltcSettings& settings,
                       const VoltVarCurve& curve, const StepInputs& in,
                       AvrState& state, int moves_cap) {
  AvrStepResult out;
  if (state.taps.empty()) state.taps.assign(model.oltcs.size(), 0);
  if (state.q_kvar.empty()) state.q_kvar.assign(model.pv_units.size(), 0.0);
  if (state.delay_counter.empty()) state.delay_counter.assign(model.oltcs.size(), 0);

  std::vector<double> q = state.q_kvar;
  std::vector<int> taps = state.taps;

  auto settle_inverters = [&](OperatingPoint& op) {
    for (int sweep = 0; sweep < 20; ++sweep) {
      InjectionSpec inj = build_injections(model, in, q, &out.p_clip_events);
      op = solve_powerflow(model, TapRatioSet::from_taps(model, taps), inj,
                           state.v_warm);
      ++out.si_iterations;
      if (!op.converged) return;
      state.v_warm = op.v;
      double worst = 0.0;
      for (size_t u = 0; u < model.pv_units.size(); ++u) {
        const auto& pv = model.pv_units[u];
        const double v_pcc = std::abs(op.v[model.node_index(pv.bus, pv.phase)]);
        const double cap = pv_q_capability_kvar(pv, in.pv_p_kw[u]);
        const double q_new = volt_var_q(curve, v_pcc, cap);
        worst = std::max(worst, std::abs(q_new - q[u]));
        q[u] = q_new;
      }
      if (worst <= 0.1) return;
    }
  };

  OperatingPoint op;
  settle_inverters(op);

  std::set<std::vector<long>> seen;
  seen.insert(quantized_state(taps, q));

  for (size_t p = 0; p < model.oltcs.size() && op.converged; ++p) {
    const auto& dev = model.oltcs[p];
    int cap = moves_cap >= 0 ? std::min(moves_cap, dev.delta_to_max)
                             : dev.delta_to_max;
    while (cap > 0) {
      const double v_mon = monitored_voltage(model, dev, op);
      int dir = 0;
      if (v_mon < settings.v_ref - settings.bandwidth / 2.0) dir = +1;
      if (v_mon > settings.v_ref + settings.bandwidth / 2.0) dir = -1;
      if (dir == 0) {
        state.delay_counter[p] = 0;
        break;
      }
      if (state.delay_counter[p] < settings.delay_steps) {
        ++state.delay_counter[p];
        break;
      }
      const int next = taps[p] + dir;
      if (next < dev.tau_min || next > dev.tau_max) break;
      taps[p] = next;
      ++out.tap_moves;
      --cap;
      settle_inverters(op);
      if (!op.converged) break;
      auto key = quantized_state(taps, q);
      if (!seen.insert(key).second) {
        out.oscillation_frozen = true;
        break;
      }
    }
    if (out.oscillation_frozen) break;
  }

  state.taps = taps;
  state.q_kvar = q;
  out.op = std::move(op);
  out.taps = taps;
  out.q_kvar = q;
  return out;
}

OvrStepResult ovr_step(const FeederModel& model, const std::vector<int>& taps,
                       const std::vector<double>& q_cmd_kvar,
                       const StepInputs& in,
                       const std::optional<Eigen::VectorXcd>& v_warm) {
  OvrStepResult out;
  out.q_kvar.resize(model.pv_units.size());
  for (size_t u = 0; u < model.pv_units.size(); ++u) {
    const double cap = pv_q_capability_kvar(model.pv_units[u], in.pv_p_kw[u]);
    const double cmd = u < q_cmd_kvar.size() ? q_cmd_kvar[u] : 0.0;
    if (std::abs(cmd) > cap + 1e-9) ++out.q_clip_events;
    out.q_kvar[u] = std::clamp(cmd, -cap, cap);
  }
  InjectionSpec inj = build_injections(model, in, out.q_kvar, &out.p_clip_events);
  out.op = solve_powerflow(model, TapRatioSet::from_taps(model, taps), inj, v_warm);
  return out;
}

}  // namespace gv
