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

#ifndef GRIDVOLT_POWERFLOW_HPP
#define GRIDVOLT_POWERFLOW_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridvolt/netmodel.hpp"

namespace gv {

using SparseC = Eigen::SparseMatrix<cdouble>;

/// Tap ratios for all OLTCs in model order. `tau` carries the integer
/// positions when the set was built from them.
struct TapRatioSet {
  std::vector<double> a;
  std::vector<int> tau;

  static TapRatioSet from_taps(const FeederModel& model,
                               const std::vector<int>& taps);
  static TapRatioSet from_ratios(std::vector<double> ratios);
};

/// Assembled nodal admittance matrix at fixed tap ratios, with the
/// slack-reduced block factorized for repeated solves.
class AdmittanceMatrix {
 public:
  /// Full N x N matrix including slack rows/columns.
  const SparseC& full() const { return y_full_; }
  /// Non-slack block (reduced ordering).
  const SparseC& reduced() const { return y_ll_; }
  /// Coupling of non-slack rows to slack columns (N_red x N_slack).
  const SparseC& slack_coupling() const { return y_l0_; }

  int n_nodes() const { return n_; }
  int n_reduced() const { return static_cast<int>(reduced_to_full_.size()); }

  /// reduced index -> full node index
  const std::vector<int>& reduced_to_full() const { return reduced_to_full_; }
  /// full node index -> reduced index, -1 for slack nodes
  const std::vector<int>& full_to_reduced() const { return full_to_reduced_; }

  /// Solves Y_LL x = rhs on the reduced space.
  Eigen::VectorXcd solve_reduced(const Eigen::VectorXcd& rhs) const;

  const TapRatioSet& taps() const { return taps_; }

 private:
  friend AdmittanceMatrix assemble_ybus(const FeederModel&, const TapRatioSet&);
  SparseC y_full_;
  SparseC y_ll_;
  SparseC y_l0_;
  int n_ = 0;
  std::vector<int> reduced_to_full_;
  std::vector<int> full_to_reduced_;
  TapRatioSet taps_;
  std::shared_ptr<Eigen::SparseLU<SparseC>> lu_;
};

/// Stamps branches, shunts, and transformers at the given tap ratios and
/// factorizes the slack-reduced block. Transformer stamp per regulated
/// phase: primary self a^2/z_T, secondary self 1/z_T, mutual -a/z_T.
/// Throws NumericError naming a node when the matrix is singular.
AdmittanceMatrix assemble_ybus(const FeederModel& model, const TapRatioSet& taps);

/// Writes the full matrix as triplets: row,col,re,im.
void dump_ybus_csv(const AdmittanceMatrix& y, const std::string& path);

/// Net complex power injections per node, per-unit, generation positive.
/// Slack entries must be zero.
struct InjectionSpec {
  Eigen::VectorXcd s_pu;
};

/// Converged state of one power flow: full voltage vector, net injection
/// currents I0 = Y V0, and solve diagnostics.
struct OperatingPoint {
  Eigen::VectorXcd v;       // per-unit complex node voltages
  Eigen::VectorXcd i;       // net nodal injection currents, I = Y v
  std::vector<int> taps;    // integer tap per OLTC (model order)
  bool converged = false;
  bool collapsed = false;   // some |V| fell below 0.5 pu during iteration
  double mismatch = 0.0;    // max |S(v) - S_spec| over non-slack nodes
  int iterations = 0;
};

struct PowerFlowOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
  double collapse_voltage = 0.5;
};

/// Fixed-point current-injection solve on the factorized admittance matrix:
/// iterate I_k = conj(S / V_k), V_{k+1} = Y_LL^-1 (I_k - Y_L0 V_slack) with
/// slack voltages held at the source specification. Returns an unconverged
/// OperatingPoint (with diagnostics) rather than throwing.
OperatingPoint solve_powerflow(const FeederModel& model,
                               const AdmittanceMatrix& y,
                               const InjectionSpec& inj,
                               const std::optional<Eigen::VectorXcd>& v_init = {},
                               const PowerFlowOptions& opts = {});

/// Convenience overload assembling the matrix internally.
OperatingPoint solve_powerflow(const FeederModel& model, const TapRatioSet& taps,
                               const InjectionSpec& inj,
                               const std::optional<Eigen::VectorXcd>& v_init = {},
                               const PowerFlowOptions& opts = {});

/// |V_i| per node.
Eigen::VectorXd voltage_magnitudes(const OperatingPoint& op);

/// Source voltage phasor for a phase (exact slack value).
cdouble source_voltage(const FeederModel& model, Phase ph);

/// Flat-start voltage guess: every node at its phase's source voltage.
Eigen::VectorXcd flat_start(const FeederModel& model);

}  // namespace gv

#endif  // GRIDVOLT_POWERFLOW_HPP
