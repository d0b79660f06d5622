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

#ifndef GRIDVOLT_LINMODEL_HPP
#define GRIDVOLT_LINMODEL_HPP

#include <string>
#include <vector>

#include "gridvolt/powerflow.hpp"

namespace gv {

/// First-order voltage response to one OLTC's tap-ratio change around a0.
///
/// w is the full-space vector satisfying dV = (a - a0) w for the device
/// acting alone, computed as w = -Y0^-1 G Y0^-1 I0 where G carries the
/// linearized admittance perturbation (primary self 2*a0/z_T, mutuals
/// -1/z_T) and Y0^-1 I0 is the base voltage V0. Slack entries are zero.
struct TapSensitivity {
  double a0 = 1.0;
  Eigen::VectorXcd w;  // full N, per unit tap-ratio change
  /// Reduced-space entries of G * V0 (at most two per regulated phase);
  /// satisfies Y_LL w = -g. Exposed for sparse constraint assembly.
  std::vector<std::pair<int, cdouble>> g;
};

/// Affine map from (tap ratios, injection-current perturbation) to voltage
/// perturbation, plus the voltage-magnitude linearization coefficients:
/// |V| ~= |V0| + (V_d0 dV_d + V_q0 dV_q) / |V0|. Immutable after build.
struct SensitivityModel {
  AdmittanceMatrix y0;           // factorized at the base tap ratios
  Eigen::VectorXcd v0;           // base voltages, full
  Eigen::VectorXcd i0;           // net injection currents, I0 = Y0 V0, full
  std::vector<TapSensitivity> tap_sens;
  Eigen::VectorXd vmag0;         // |V0|
  Eigen::VectorXd coeff_d;       // V_d0 / |V0|
  Eigen::VectorXd coeff_q;       // V_q0 / |V0|
};

/// Builds the sensitivity model at a converged operating point. Uses one
/// sparse solve per OLTC on the already-factorized Y0 (the inner solve of
/// -Y0^-1 G Y0^-1 I0 is the power flow's own V0).
/// Throws NumericError when some |V0_i| < 1e-6 pu (degenerate magnitude
/// linearization), naming the node.
SensitivityModel build_sensitivity(const FeederModel& model,
                                   const AdmittanceMatrix& y0,
                                   const OperatingPoint& op);

struct VoltagePrediction {
  Eigen::VectorXcd dv;     // complex perturbation, full, zero at slack
  Eigen::VectorXd vmag;    // linearized |V| per node
};

/// dV = sum_p (a_p - a0_p) w_p + Z0 dI, magnitudes per the affine relation.
/// dI is the device injection-current perturbation (full-length; slack
/// entries ignored).
VoltagePrediction predict_voltage(const SensitivityModel& sm,
                                  const TapRatioSet& taps,
                                  const Eigen::VectorXcd& di);

/// Base quantities entering the linearized power-injection relations.
struct InjectionLinearization {
  Eigen::VectorXd v_d0, v_q0, i_d0, i_q0;
};

InjectionLinearization injection_linearization(const OperatingPoint& op);

/// Linearized power perturbations (higher-order bilinear terms dropped):
///   dP = V_d0 dI_d + dV_d I_d0 + V_q0 dI_q + dV_q I_q0
///   dQ = V_q0 dI_d + dV_q I_d0 - V_d0 dI_q - dV_d I_q0
void delta_pq(const InjectionLinearization& lin, const Eigen::VectorXcd& dv,
              const Eigen::VectorXcd& di, Eigen::VectorXd& dp_out,
              Eigen::VectorXd& dq_out);

/// One validation case: new tap ratios plus forced power-injection changes
/// at device nodes (dp/dq are zero at load nodes by the fixed-power model;
/// dq at PV nodes is the inverter dispatch).
struct LinErrorCase {
  std::string id;
  TapRatioSet taps;
  Eigen::VectorXd dp_pu;
  Eigen::VectorXd dq_pu;
};

struct LinErrorCaseResult {
  std::string id;
  double max_abs_err = 0.0;
  double mean_abs_err = 0.0;
  Eigen::VectorXd err;  // per node, predicted |V| minus re-solved |V|
};

struct LinErrorReport {
  std::vector<LinErrorCaseResult> cases;
  double max_abs_err = 0.0;
  double mean_abs_err = 0.0;
};

/// For each case, solves the linearized physics (voltage equation, tap
/// model, fixed-power loads, forced PV dispatch) for the predicted
/// magnitudes and compares them against a full nonlinear re-solve at the
/// case's taps and injections. Propagates power-flow non-convergence.
LinErrorReport linearization_error_report(const FeederModel& model,
                                          const SensitivityModel& sm,
                                          const InjectionSpec& base_injections,
                                          const std::vector<LinErrorCase>& cases);

void write_linerror_csv(const LinErrorReport& report, const std::string& path);
void write_linerror_summary_json(const LinErrorReport& report,
                                 const std::string& path);

/// Linear voltage response used by the error report: solves
/// (Y - dJ/dV) dV = M^-1 [dp; dq] - sum_p (a_p - a0_p) g_p
/// on the reduced space, where device nodes contribute the fixed-power
/// current-response blocks. `device_node` marks nodes whose injection
/// currents respond to voltage (loads and PV); others have dJ = 0.
Eigen::VectorXcd linear_voltage_response(const SensitivityModel& sm,
                                         const std::vector<bool>& device_node,
                                         const TapRatioSet& taps,
                                         const Eigen::VectorXd& dp_pu,
                                         const Eigen::VectorXd& dq_pu);

}  // namespace gv

#endif  // GRIDVOLT_LINMODEL_HPP
