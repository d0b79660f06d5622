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

#include "gridvolt/powerflow.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace gv {

TapRatioSet TapRatioSet::from_taps(const FeederModel& model,
                                   const std::vector<int>& taps) {
  if (taps.size() != model.oltcs.size()) {
    throw NumericError("tap vector size does not match OLTC count");
  }
  TapRatioSet s;
  s.tau = taps;
  for (size_t p = 0; p < taps.size(); ++p) {
    const auto& d = model.oltcs[p];
    if (taps[p] < d.tau_min || taps[p] > d.tau_max) {
      throw NumericError("tap position " + std::to_string(taps[p]) +
                         " outside range of OLTC '" + d.id + "'");
    }
    s.a.push_back(d.ratio_for_tap(taps[p]));
  }
  return s;
}

TapRatioSet TapRatioSet::from_ratios(std::vector<double> ratios) {
  TapRatioSet s;
  s.a = std::move(ratios);
  return s;
}

namespace {

// Inverse of a small dense complex matrix (branch phase block).
std::vector<std::vector<cdouble>> invert_block(
    const std::vector<std::vector<cdouble>>& z, const std::string& what) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = z[r][c];
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  if (!lu.isInvertible()) {
    throw NumericError("singular impedance block on " + what);
  }
  Eigen::MatrixXcd inv = lu.inverse();
  std::vector<std::vector<cdouble>> out(n, std::vector<cdouble>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[r][c] = inv(r, c);
  return out;
}

}  // namespace

AdmittanceMatrix assemble_ybus(const FeederModel& model, const TapRatioSet& taps) {
  if (taps.a.size() != model.oltcs.size()) {
    throw NumericError("tap ratio set does not match OLTC count");
  }
  const int n = model.n_nodes();
  std::vector<Eigen::Triplet<cdouble>> trips;
  trips.reserve(model.branches.size() * 36 + model.oltcs.size() * 12 + 8);

  for (const auto& br : model.branches) {
    const double zb = model.z_base_ohm(br.from_bus);
    const int dim = static_cast<int>(br.phases.size());
    // per-unit series admittance block
    std::vector<std::vector<cdouble>> zpu(dim, std::vector<cdouble>(dim));
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) zpu[r][c] = br.series_z_ohm[r][c] / zb;
    auto ypu = invert_block(zpu, "branch " + br.from_bus + "-" + br.to_bus);

    std::vector<int> fidx(dim), tidx(dim);
    for (int k = 0; k < dim; ++k) {
      fidx[k] = model.node_index(br.from_bus, br.phases[k]);
      tidx[k] = model.node_index(br.to_bus, br.phases[k]);
    }
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const cdouble y = ypu[r][c];
        trips.emplace_back(fidx[r], fidx[c], y);
        trips.emplace_back(tidx[r], tidx[c], y);
        trips.emplace_back(fidx[r], tidx[c], -y);
        trips.emplace_back(tidx[r], fidx[c], -y);
        if (!br.shunt_y_siemens.empty()) {
          // half the total shunt at each end
          const cdouble ysh = br.shunt_y_siemens[r][c] * zb * 0.5;
          trips.emplace_back(fidx[r], fidx[c], ysh);
          trips.emplace_back(tidx[r], tidx[c], ysh);
        }
      }
    }
  }

  for (size_t p = 0; p < model.oltcs.size(); ++p) {
    const auto& d = model.oltcs[p];
    const double a = taps.a[p];
    const cdouble yt = 1.0 / d.z_t_pu;
    for (Phase ph : d.phases) {
      const int i = model.node_index(d.primary_bus, ph);
      const int j = model.node_index(d.secondary_bus, ph);
      trips.emplace_back(i, i, a * a * yt);
      trips.emplace_back(j, j, yt);
      trips.emplace_back(i, j, -a * yt);
      trips.emplace_back(j, i, -a * yt);
    }
  }

  AdmittanceMatrix y;
  y.n_ = n;
  y.taps_ = taps;
  y.y_full_.resize(n, n);
  y.y_full_.setFromTriplets(trips.begin(), trips.end());

  // Reduced ordering over non-slack nodes.
  y.full_to_reduced_.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    if (!model.is_slack_node(k)) {
      y.full_to_reduced_[k] = static_cast<int>(y.reduced_to_full_.size());
      y.reduced_to_full_.push_back(k);
    }
  }
  const int nr = static_cast<int>(y.reduced_to_full_.size());
  const int ns = static_cast<int>(model.slack_indices().size());
  std::vector<int> slack_pos(n, -1);
  for (int s = 0; s < ns; ++s) slack_pos[model.slack_indices()[s]] = s;

  std::vector<Eigen::Triplet<cdouble>> ll, l0;
  for (int col = 0; col < y.y_full_.outerSize(); ++col) {
    for (SparseC::InnerIterator it(y.y_full_, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      if (y.full_to_reduced_[r] < 0) continue;  // slack row
      if (y.full_to_reduced_[c] >= 0) {
        ll.emplace_back(y.full_to_reduced_[r], y.full_to_reduced_[c], it.value());
      } else {
        l0.emplace_back(y.full_to_reduced_[r], slack_pos[c], it.value());
      }
    }
  }
  y.y_ll_.resize(nr, nr);
  y.y_ll_.setFromTriplets(ll.begin(), ll.end());
  y.y_l0_.resize(nr, ns);
  y.y_l0_.setFromTriplets(l0.begin(), l0.end());

  // Structural singularity check gives a nameable node before the LU.
  for (int k = 0; k < nr; ++k) {
    if (y.y_ll_.outerIndexPtr()[k + 1] == y.y_ll_.outerIndexPtr()[k]) {
      throw NumericError("isolated node " +
                         model.nodes()[y.reduced_to_full_[k]].name() +
                         ": admittance matrix is singular");
    }
  }

  y.lu_ = std::make_shared<Eigen::SparseLU<SparseC>>();
  y.lu_->analyzePattern(y.y_ll_);
  y.lu_->factorize(y.y_ll_);
  if (y.lu_->info() != Eigen::Success) {
    throw NumericError("admittance matrix factorization failed (singular)");
  }
  return y;
}

Eigen::VectorXcd AdmittanceMatrix::solve_reduced(const Eigen::VectorXcd& rhs) const {
  return lu_->solve(rhs);
}

void dump_ybus_csv(const AdmittanceMatrix& y, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "row,col,re,im\n";
  char buf[128];
  const auto& m = y.full();
  for (int col = 0; col < m.outerSize(); ++col) {
    for (SparseC::InnerIterator it(m, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld,%ld,%.17g,%.17g\n",
                    static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value().real(), it.value().imag());
      out << buf;
    }
  }
}

cdouble source_voltage(const FeederModel& model, Phase ph) {
  for (const auto& sp : model.source.phases) {
    if (sp.phase == ph) {
      const double ang = sp.angle_deg * std::numbers::pi / 180.0;
      return std::polar(sp.mag_pu, ang);
    }
  }
  // Balanced default for a phase the source does not list.
  const double ang = -120.0 * static_cast<int>(ph) * std::numbers::pi / 180.0;
  return std::polar(1.0, ang);
}

Eigen::VectorXcd flat_start(const FeederModel& model) {
  Eigen::VectorXcd v(model.n_nodes());
  for (const auto& node : model.nodes()) {
    v[node.index] = source_voltage(model, node.phase);
  }
  return v;
}

OperatingPoint solve_powerflow(const FeederModel& model,
                               const AdmittanceMatrix& y,
                               const InjectionSpec& inj,
                               const std::optional<Eigen::VectorXcd>& v_init,
                               const PowerFlowOptions& opts) {
  const int n = model.n_nodes();
  if (inj.s_pu.size() != n) {
    throw NumericError("injection vector size mismatch");
  }
  for (int s : model.slack_indices()) {
    if (inj.s_pu[s] != cdouble(0, 0)) {
      throw NumericError("slack node " + model.nodes()[s].name() +
                         " carries an injection");
    }
  }

  OperatingPoint op;
  op.taps = y.taps().tau;
  op.v = v_init ? *v_init : flat_start(model);
  if (op.v.size() != n) throw NumericError("v_init size mismatch");

  // Slack values are pinned exactly.
  Eigen::VectorXcd v_slack(model.slack_indices().size());
  for (size_t s = 0; s < model.slack_indices().size(); ++s) {
    const int idx = model.slack_indices()[s];
    v_slack[s] = source_voltage(model, model.nodes()[idx].phase);
    op.v[idx] = v_slack[s];
  }
  const Eigen::VectorXcd i_eq = -(y.slack_coupling() * v_slack);

  const int nr = y.n_reduced();
  const auto& r2f = y.reduced_to_full();

  auto mismatch_of = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd i_net = y.full() * v;
    double worst = 0.0;
    for (int k = 0; k < nr; ++k) {
      const int f = r2f[k];
      const cdouble s_calc = v[f] * std::conj(i_net[f]);
      worst = std::max(worst, std::abs(s_calc - inj.s_pu[f]));
    }
    return worst;
  };

  op.mismatch = mismatch_of(op.v);
  if (op.mismatch <= opts.tolerance) {
    op.converged = true;
  } else {
    Eigen::VectorXcd rhs(nr);
    for (op.iterations = 1; op.iterations <= opts.max_iterations; ++op.iterations) {
      for (int k = 0; k < nr; ++k) {
        const int f = r2f[k];
        rhs[k] = std::conj(inj.s_pu[f] / op.v[f]) + i_eq[k];
      }
      Eigen::VectorXcd v_l = y.solve_reduced(rhs);
      for (int k = 0; k < nr; ++k) {
        op.v[r2f[k]] = v_l[k];
        if (std::abs(v_l[k]) < opts.collapse_voltage) op.collapsed = true;
      }
      if (op.collapsed) break;
      op.mismatch = mismatch_of(op.v);
      if (op.mismatch <= opts.tolerance) {
        op.converged = true;
        break;
      }
    }
  }

  op.i = y.full() * op.v;
  return op;
}

OperatingPoint solve_powerflow(const FeederModel& model, const TapRatioSet& taps,
                               const InjectionSpec& inj,
                               const std::optional<Eigen::VectorXcd>& v_init,
                               const PowerFlowOptions& opts) {
  AdmittanceMatrix y = assemble_ybus(model, taps);
  return solve_powerflow(model, y, inj, v_init, opts);
}

Eigen::VectorXd voltage_magnitudes(const OperatingPoint& op) {
  return op.v.cwiseAbs();
}

}  // namespace gv
