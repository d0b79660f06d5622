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

#include "gridvolt/linmodel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace gv {

namespace {
constexpr double kDegenerateVoltage = 1e-6;
}

SensitivityModel build_sensitivity(const FeederModel& model,
                                   const AdmittanceMatrix& y0,
                                   const OperatingPoint& op) {
  if (!op.converged) {
    throw PowerFlowError("sensitivity requires a converged operating point");
  }
  SensitivityModel sm;
  sm.y0 = y0;
  sm.v0 = op.v;
  sm.i0 = op.i;

  const int n = model.n_nodes();
  sm.vmag0.resize(n);
  sm.coeff_d.resize(n);
  sm.coeff_q.resize(n);
  for (int k = 0; k < n; ++k) {
    const double mag = std::abs(op.v[k]);
    if (mag < kDegenerateVoltage) {
      throw NumericError("degenerate magnitude linearization at node " +
                         model.nodes()[k].name() + ": |V0| < 1e-6 pu");
    }
    sm.vmag0[k] = mag;
    sm.coeff_d[k] = op.v[k].real() / mag;
    sm.coeff_q[k] = op.v[k].imag() / mag;
  }

  const auto& f2r = y0.full_to_reduced();
  const int nr = y0.n_reduced();

  for (size_t p = 0; p < model.oltcs.size(); ++p) {
    const auto& d = model.oltcs[p];
    TapSensitivity ts;
    ts.a0 = y0.taps().a[p];
    const cdouble yt = 1.0 / d.z_t_pu;

    // G V0 has entries only at the transformer's nodes:
    //   (G V0)_i = (2 a0 / z_T) V0_i - (1 / z_T) V0_j
    //   (G V0)_j = -(1 / z_T) V0_i
    // Slack rows are dropped (their voltage cannot move).
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(nr);
    for (Phase ph : d.phases) {
      const int i = model.node_index(d.primary_bus, ph);
      const int j = model.node_index(d.secondary_bus, ph);
      if (f2r[i] >= 0) g[f2r[i]] += 2.0 * ts.a0 * yt * op.v[i] - yt * op.v[j];
      if (f2r[j] >= 0) g[f2r[j]] += -yt * op.v[i];
    }
    for (int k = 0; k < nr; ++k) {
      if (g[k] != cdouble(0, 0)) ts.g.emplace_back(k, g[k]);
    }

    Eigen::VectorXcd w_red = -y0.solve_reduced(g);
    ts.w = Eigen::VectorXcd::Zero(n);
    for (int k = 0; k < nr; ++k) ts.w[y0.reduced_to_full()[k]] = w_red[k];
    sm.tap_sens.push_back(std::move(ts));
  }
  return sm;
}

VoltagePrediction predict_voltage(const SensitivityModel& sm,
                                  const TapRatioSet& taps,
                                  const Eigen::VectorXcd& di) {
  const int n = static_cast<int>(sm.v0.size());
  const int nr = sm.y0.n_reduced();
  const auto& r2f = sm.y0.reduced_to_full();

  Eigen::VectorXcd di_red(nr);
  for (int k = 0; k < nr; ++k) di_red[k] = di[r2f[k]];
  Eigen::VectorXcd dv_red = sm.y0.solve_reduced(di_red);

  VoltagePrediction out;
  out.dv = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < nr; ++k) out.dv[r2f[k]] = dv_red[k];
  for (size_t p = 0; p < sm.tap_sens.size(); ++p) {
    out.dv += (taps.a[p] - sm.tap_sens[p].a0) * sm.tap_sens[p].w;
  }

  out.vmag.resize(n);
  for (int k = 0; k < n; ++k) {
    out.vmag[k] = sm.vmag0[k] + sm.coeff_d[k] * out.dv[k].real() +
                  sm.coeff_q[k] * out.dv[k].imag();
  }
  return out;
}

InjectionLinearization injection_linearization(const OperatingPoint& op) {
  InjectionLinearization lin;
  lin.v_d0 = op.v.real();
  lin.v_q0 = op.v.imag();
  lin.i_d0 = op.i.real();
  lin.i_q0 = op.i.imag();
  return lin;
}

void delta_pq(const InjectionLinearization& lin, const Eigen::VectorXcd& dv,
              const Eigen::VectorXcd& di, Eigen::VectorXd& dp_out,
              Eigen::VectorXd& dq_out) {
  const auto dvd = dv.real().eval(), dvq = dv.imag().eval();
  const auto did = di.real().eval(), diq = di.imag().eval();
  dp_out = lin.v_d0.cwiseProduct(did) + dvd.cwiseProduct(lin.i_d0) +
           lin.v_q0.cwiseProduct(diq) + dvq.cwiseProduct(lin.i_q0);
  dq_out = lin.v_q0.cwiseProduct(did) + dvq.cwiseProduct(lin.i_d0) -
           lin.v_d0.cwiseProduct(diq) - dvd.cwiseProduct(lin.i_q0);
}

Eigen::VectorXcd linear_voltage_response(const SensitivityModel& sm,
                                         const std::vector<bool>& device_node,
                                         const TapRatioSet& taps,
                                         const Eigen::VectorXd& dp_pu,
                                         const Eigen::VectorXd& dq_pu) {
  const int n = static_cast<int>(sm.v0.size());
  const int nr = sm.y0.n_reduced();
  const auto& r2f = sm.y0.reduced_to_full();

  // Real 2x2-block system over (dV_d, dV_q): start from Y_LL, add the
  // fixed-power current response M^-1 C on device diagonals.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(sm.y0.reduced().nonZeros() * 4 + nr * 4);
  const auto& yll = sm.y0.reduced();
  for (int col = 0; col < yll.outerSize(); ++col) {
    for (SparseC::InnerIterator it(yll, col); it; ++it) {
      const int r = static_cast<int>(it.row());
      const int c = static_cast<int>(it.col());
      const double yr = it.value().real(), yi = it.value().imag();
      trips.emplace_back(2 * r, 2 * c, yr);
      trips.emplace_back(2 * r, 2 * c + 1, -yi);
      trips.emplace_back(2 * r + 1, 2 * c, yi);
      trips.emplace_back(2 * r + 1, 2 * c + 1, yr);
    }
  }
  for (int k = 0; k < nr; ++k) {
    const int f = r2f[k];
    if (!device_node[f]) continue;
    const cdouble vj = sm.v0[f] * sm.i0[f];  // V0 * J0 (not conjugated)
    const double m2 = std::norm(sm.v0[f]);
    const double re = vj.real() / m2, im = vj.imag() / m2;
    trips.emplace_back(2 * k, 2 * k, re);
    trips.emplace_back(2 * k, 2 * k + 1, im);
    trips.emplace_back(2 * k + 1, 2 * k, im);
    trips.emplace_back(2 * k + 1, 2 * k + 1, -re);
  }
  Eigen::SparseMatrix<double> sys(2 * nr, 2 * nr);
  sys.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * nr);
  for (int k = 0; k < nr; ++k) {
    const int f = r2f[k];
    if (!device_node[f]) continue;
    const double vd = sm.v0[f].real(), vq = sm.v0[f].imag();
    const double m2 = std::norm(sm.v0[f]);
    rhs[2 * k] += (vd * dp_pu[f] + vq * dq_pu[f]) / m2;
    rhs[2 * k + 1] += (vq * dp_pu[f] - vd * dq_pu[f]) / m2;
  }
  for (size_t p = 0; p < sm.tap_sens.size(); ++p) {
    const double da = taps.a[p] - sm.tap_sens[p].a0;
    for (const auto& [k, gk] : sm.tap_sens[p].g) {
      rhs[2 * k] -= da * gk.real();
      rhs[2 * k + 1] -= da * gk.imag();
    }
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys);
  if (lu.info() != Eigen::Success) {
    throw NumericError("linear response system is singular");
  }
  Eigen::VectorXd x = lu.solve(rhs);

  Eigen::VectorXcd dv = Eigen::VectorXcd::Zero(n);
  for (int k = 0; k < nr; ++k) dv[r2f[k]] = cdouble(x[2 * k], x[2 * k + 1]);
  return dv;
}

LinErrorReport linearization_error_report(const FeederModel& model,
                                          const SensitivityModel& sm,
                                          const InjectionSpec& base_injections,
                                          const std::vector<LinErrorCase>& cases) {
  LinErrorReport report;
  const int n = model.n_nodes();

  std::vector<bool> device(n, false);
  for (const auto& ld : model.loads) {
    device[model.node_index(ld.bus, ld.phase)] = true;
  }
  for (const auto& pv : model.pv_units) {
    device[model.node_index(pv.bus, pv.phase)] = true;
  }

  double total_abs = 0.0;
  size_t total_count = 0;
  for (const auto& c : cases) {
    Eigen::VectorXcd dv =
        linear_voltage_response(sm, device, c.taps, c.dp_pu, c.dq_pu);
    Eigen::VectorXd predicted(n);
    for (int k = 0; k < n; ++k) {
      predicted[k] = sm.vmag0[k] + sm.coeff_d[k] * dv[k].real() +
                     sm.coeff_q[k] * dv[k].imag();
    }

    InjectionSpec inj;
    inj.s_pu = base_injections.s_pu;
    for (int k = 0; k < n; ++k) inj.s_pu[k] += cdouble(c.dp_pu[k], c.dq_pu[k]);
    OperatingPoint op = solve_powerflow(model, c.taps, inj, sm.v0);
    if (!op.converged) {
      throw PowerFlowError("linearization case '" + c.id +
                           "': power flow did not converge (mismatch " +
                           std::to_string(op.mismatch) + ")");
    }

    // Stats over non-slack nodes (slack magnitudes are pinned).
    LinErrorCaseResult res;
    res.id = c.id;
    res.err = predicted - voltage_magnitudes(op);
    for (int s : model.slack_indices()) res.err[s] = 0.0;
    const int n_free = n - static_cast<int>(model.slack_indices().size());
    res.max_abs_err = res.err.cwiseAbs().maxCoeff();
    res.mean_abs_err = n_free ? res.err.cwiseAbs().sum() / n_free : 0.0;
    report.max_abs_err = std::max(report.max_abs_err, res.max_abs_err);
    total_abs += res.err.cwiseAbs().sum();
    total_count += static_cast<size_t>(n_free);
    report.cases.push_back(std::move(res));
  }
  report.mean_abs_err = total_count ? total_abs / total_count : 0.0;
  return report;
}

void write_linerror_csv(const LinErrorReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "case_id,node,E\n";
  char buf[128];
  for (const auto& c : report.cases) {
    for (int k = 0; k < c.err.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.10g\n", c.id.c_str(), k, c.err[k]);
      out << buf;
    }
  }
}

void write_linerror_summary_json(const LinErrorReport& report,
                                 const std::string& path) {
  nlohmann::json j;
  j["max_abs_err"] = report.max_abs_err;
  j["mean_abs_err"] = report.mean_abs_err;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : report.cases) {
    j["cases"].push_back({{"id", c.id},
                          {"max_abs_err", c.max_abs_err},
                          {"mean_abs_err", c.mean_abs_err}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace gv
