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

#ifndef GRIDVOLT_CONTROLLERS_HPP
#define GRIDVOLT_CONTROLLERS_HPP

#include <optional>
#include <vector>

#include "gridvolt/powerflow.hpp"

namespace gv {

/// Piecewise-linear volt-var rule: maps PCC voltage to a fraction of the
/// momentarily available reactive power. Monotone non-increasing, clamped
/// outside the breakpoint range.
struct VoltVarCurve {
  std::vector<std::pair<double, double>> breakpoints;  // (v_pu, q_fraction)

  void validate() const;
  double q_fraction(double v_pcc) const;

  /// Default shape: full injection below 0.92, deadband 0.98..1.02, full
  /// absorption above 1.08.
  static VoltVarCurve recommended_default();
};

/// q = interp(curve, v_pcc) * q_max, clipped to [-q_max, q_max].
double volt_var_q(const VoltVarCurve& curve, double v_pcc, double q_max_kvar);

struct AvrOltcSettings {
  double v_ref = 1.03;        // pu
  double bandwidth = 0.0167;  // pu, full width
  double time_delay_s = 0.0;  // informational; drives delay_steps
  int delay_steps = 0;        // consecutive out-of-band steps required to move
};

/// Per-step device data the controllers consume, already in per-unit except
/// PV available power which tracks the profile in kW.
struct StepInputs {
  std::vector<double> load_p_pu;  // per LoadSpec
  std::vector<double> load_q_pu;
  std::vector<double> pv_p_kw;    // per PvUnit, clipped to s_kva downstream
};

/// Mutable controller state carried across steps of one timeline.
struct AvrState {
  std::vector<int> taps;
  std::vector<double> q_kvar;        // per PV unit, last settled outputs
  std::vector<int> delay_counter;    // per OLTC
  std::optional<Eigen::VectorXcd> v_warm;
};

struct AvrStepResult {
  OperatingPoint op;
  std::vector<int> taps;
  std::vector<double> q_kvar;
  int tap_moves = 0;
  int si_iterations = 0;
  bool oscillation_frozen = false;
  int p_clip_events = 0;
};

/// One quasi-steady-state AVR step: smart inverters settle to a volt-var
/// fixed point (max |dq| <= 0.1 kvar or 20 sweeps), then each OLTC moves at
/// most `moves_cap` (clamped to delta_to_max) steps toward its reference,
/// re-settling inverters after every move. Repeated (tap, q) states freeze
/// the step and set the oscillation flag. The monitored voltage is the
/// phase-average magnitude at the OLTC secondary bus.
AvrStepResult avr_step(const FeederModel& model, const AvrOltcSettings& settings,
                       const VoltVarCurve& curve, const StepInputs& in,
                       AvrState& state, int moves_cap = -1);

struct OvrStepResult {
  OperatingPoint op;
  std::vector<double> q_kvar;  // realized per unit after capability clipping
  int q_clip_events = 0;
  int p_clip_events = 0;
};

/// Applies optimizer commands: taps fixed, SI reactive power as commanded
/// but clipped to the true momentary capability sqrt(S^2 - P^2). The power
/// flow result is the realized system state.
OvrStepResult ovr_step(const FeederModel& model, const std::vector<int>& taps,
                       const std::vector<double>& q_cmd_kvar,
                       const StepInputs& in,
                       const std::optional<Eigen::VectorXcd>& v_warm = {});

/// Injection vector for given step inputs and SI outputs (kvar per unit).
/// Load consumption enters negative, PV generation positive. PV real power
/// above the inverter rating is clipped; the count is reported through
/// p_clip_events where used.
InjectionSpec build_injections(const FeederModel& model, const StepInputs& in,
                               const std::vector<double>& pv_q_kvar,
                               int* p_clip_events = nullptr);

/// Available reactive headroom of a unit at real output p_kw.
double pv_q_capability_kvar(const PvUnit& unit, double p_kw);

}  // namespace gv

#endif  // GRIDVOLT_CONTROLLERS_HPP
