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

#include "gridvolt/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>

namespace gv {

namespace {

std::string idx_name(const char* stem, int t, int k) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s_t%d_%d", stem, t, k);
  return buf;
}

}  // namespace

AssembledDispatch assemble(const DispatchProblem& problem) {
  if (problem.n_steps <= 0) throw NumericError("empty dispatch horizon");
  if (static_cast<int>(problem.sens.size()) != problem.n_steps) {
    throw NumericError("sensitivity model count does not match horizon");
  }
  const int T = problem.n_steps;
  const int n_pv = static_cast<int>(problem.pv_nodes.size());
  if (problem.q_max_pu.rows() != T || problem.q_max_pu.cols() != n_pv) {
    throw NumericError("q_max matrix dimensions do not match horizon/PV nodes");
  }
  const int n_oltc = static_cast<int>(problem.oltcs.size());
  for (const auto& sm : problem.sens) {
    if (static_cast<int>(sm.tap_sens.size()) != n_oltc) {
      throw NumericError("sensitivity model OLTC count mismatch");
    }
  }

  const auto& sm0 = problem.sens.front();
  const int nr = sm0.y0.n_reduced();
  const int n_full = sm0.y0.n_nodes();
  const auto& f2r = sm0.y0.full_to_reduced();

  AssembledDispatch out;
  out.n_steps = T;
  out.nr = nr;
  out.r2f = sm0.y0.reduced_to_full();
  out.n_oltc = n_oltc;
  out.n_pv = n_pv;

  // node classes in reduced space
  std::vector<int> klass(nr, 0);  // 0 bare, 1 load, 2 pv
  for (int n : problem.load_nodes) {
    if (f2r[n] >= 0) klass[f2r[n]] = 1;
  }
  std::vector<int> pv_of_k(nr, -1);
  for (int j = 0; j < n_pv; ++j) {
    const int k = f2r[problem.pv_nodes[j]];
    if (k < 0) throw NumericError("PV node on the slack bus");
    klass[k] = 2;
    pv_of_k[k] = j;
  }

  lp::LpBuilder b;

  // ---- columns: per-step physics blocks ----
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < nr; ++k) {
      b.add_col(idx_name("dVd", t, k), -problem.dv_box, problem.dv_box, 0.0);
    }
    for (int k = 0; k < nr; ++k) {
      b.add_col(idx_name("dVq", t, k), -problem.dv_box, problem.dv_box, 0.0);
    }
    for (int k = 0; k < nr; ++k) {
      const double box = klass[k] == 0 ? 0.0 : problem.di_box;
      b.add_col(idx_name("dId", t, k), -box, box, 0.0);
    }
    for (int k = 0; k < nr; ++k) {
      const double box = klass[k] == 0 ? 0.0 : problem.di_box;
      b.add_col(idx_name("dIq", t, k), -box, box, 0.0);
    }
  }

  // reachability-tightened integer tap bounds per step
  std::vector<std::vector<int>> tau_lo(n_oltc), tau_hi(n_oltc);
  for (int p = 0; p < n_oltc; ++p) {
    const auto& d = problem.oltcs[p];
    tau_lo[p].resize(T);
    tau_hi[p].resize(T);
    for (int t = 0; t < T; ++t) {
      int lo = d.tau_min, hi = d.tau_max;
      if (d.tau_prev) {
        lo = std::max(lo, *d.tau_prev - d.delta_to_max * (t + 1));
        hi = std::min(hi, *d.tau_prev + d.delta_to_max * (t + 1));
      }
      if (lo > hi) throw NumericError("tau_prev outside device range");
      tau_lo[p][t] = lo;
      tau_hi[p][t] = hi;
    }
  }

  out.a_base = b.n_cols();
  for (int p = 0; p < n_oltc; ++p) {
    const auto& d = problem.oltcs[p];
    const double slope = (d.a_max - 1.0) / d.tau_max;
    for (int t = 0; t < T; ++t) {
      b.add_col(idx_name(("a_" + d.id).c_str(), t, p),
                1.0 + slope * tau_lo[p][t], 1.0 + slope * tau_hi[p][t], 0.0);
    }
  }
  out.tau_base = b.n_cols();
  for (int p = 0; p < n_oltc; ++p) {
    for (int t = 0; t < T; ++t) {
      b.add_col(idx_name(("tau_" + problem.oltcs[p].id).c_str(), t, p),
                tau_lo[p][t], tau_hi[p][t], 0.0, /*integer=*/true);
    }
  }
  out.d_base = b.n_cols();
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < nr; ++k) {
      b.add_col(idx_name("d", t, k), 0.0, lp::kInf, problem.w1);
    }
  }
  out.m_base = b.n_cols();
  for (int p = 0; p < n_oltc; ++p) {
    const bool counted0 = problem.oltcs[p].tau_prev.has_value();
    for (int t = 0; t < T; ++t) {
      const bool active = t > 0 || counted0;
      b.add_col(idx_name(("m_" + problem.oltcs[p].id).c_str(), t, p), 0.0,
                active ? lp::kInf : 0.0, problem.w2);
    }
  }

  // ---- voltage equality rows (admittance form, shared Y across steps) ----
  // row-wise view of Y_LL
  std::vector<std::vector<std::pair<int, cdouble>>> yrow(nr);
  {
    const auto& yll = sm0.y0.reduced();
    for (int col = 0; col < yll.outerSize(); ++col) {
      for (SparseC::InnerIterator it(yll, col); it; ++it) {
        yrow[it.row()].emplace_back(static_cast<int>(it.col()), it.value());
      }
    }
  }

  for (int t = 0; t < T; ++t) {
    const auto& sm = problem.sens[t];
    // per-row tap coupling entries for this step
    std::vector<std::vector<std::pair<int, cdouble>>> gk(nr);
    for (int p = 0; p < n_oltc; ++p) {
      for (const auto& [k, g] : sm.tap_sens[p].g) gk[k].emplace_back(p, g);
    }
    for (int k = 0; k < nr; ++k) {
      std::vector<std::pair<int, double>> re, im;
      double scale = 1.0;
      for (const auto& [mcol, y] : yrow[k]) {
        scale = std::max({scale, std::abs(y.real()), std::abs(y.imag())});
      }
      const double s = 1.0 / scale;
      for (const auto& [mcol, y] : yrow[k]) {
        if (y.real() != 0.0) {
          re.emplace_back(out.col_dvd(t, mcol), s * y.real());
          im.emplace_back(out.col_dvq(t, mcol), s * y.real());
        }
        if (y.imag() != 0.0) {
          re.emplace_back(out.col_dvq(t, mcol), -s * y.imag());
          im.emplace_back(out.col_dvd(t, mcol), s * y.imag());
        }
      }
      re.emplace_back(out.col_did(t, k), -s);
      im.emplace_back(out.col_diq(t, k), -s);
      double rhs_re = 0.0, rhs_im = 0.0;
      for (const auto& [p, g] : gk[k]) {
        re.emplace_back(out.a_col(p, t), s * g.real());
        im.emplace_back(out.a_col(p, t), s * g.imag());
        rhs_re += s * g.real() * sm.tap_sens[p].a0;
        rhs_im += s * g.imag() * sm.tap_sens[p].a0;
      }
      b.add_row(idx_name("volt_re", t, k), rhs_re, rhs_re, re);
      b.add_row(idx_name("volt_im", t, k), rhs_im, rhs_im, im);
    }
  }

  // ---- linearized power-injection rows ----
  out.dq_row.assign(static_cast<size_t>(T) * n_pv, -1);
  for (int t = 0; t < T; ++t) {
    const auto& sm = problem.sens[t];
    for (int k = 0; k < nr; ++k) {
      if (klass[k] == 0) continue;
      const int n = out.r2f[k];
      const double vd = sm.v0[n].real(), vq = sm.v0[n].imag();
      const double id = sm.i0[n].real(), iq = sm.i0[n].imag();
      std::vector<std::pair<int, double>> dp_row{{out.col_did(t, k), vd},
                                                 {out.col_dvd(t, k), id},
                                                 {out.col_diq(t, k), vq},
                                                 {out.col_dvq(t, k), iq}};
      b.add_row(idx_name("dP", t, k), 0.0, 0.0, dp_row);
      std::vector<std::pair<int, double>> dq_entries{{out.col_did(t, k), vq},
                                                     {out.col_dvq(t, k), id},
                                                     {out.col_diq(t, k), -vd},
                                                     {out.col_dvd(t, k), -iq}};
      if (klass[k] == 1) {
        b.add_row(idx_name("dQ", t, k), 0.0, 0.0, dq_entries);
      } else {
        const int pv = pv_of_k[k];
        const double qm = problem.q_max_pu(t, pv);
        out.dq_row[t * n_pv + pv] =
            b.add_row(idx_name("dQpv", t, k), -qm, qm, dq_entries);
      }
    }
  }

  // ---- deviation auxiliaries against the affine |V| relation ----
  for (int t = 0; t < T; ++t) {
    const auto& sm = problem.sens[t];
    for (int k = 0; k < nr; ++k) {
      const int n = out.r2f[k];
      const double cd = sm.coeff_d[n], cq = sm.coeff_q[n];
      const double v0 = sm.vmag0[n];
      b.add_row(idx_name("dev_lo", t, k), 1.0 - v0, lp::kInf,
                {{out.d_col(t, k), 1.0},
                 {out.col_dvd(t, k), cd},
                 {out.col_dvq(t, k), cq}});
      b.add_row(idx_name("dev_hi", t, k), v0 - 1.0, lp::kInf,
                {{out.d_col(t, k), 1.0},
                 {out.col_dvd(t, k), -cd},
                 {out.col_dvq(t, k), -cq}});
    }
  }

  // ---- tap machinery: ratio links, ramps, move auxiliaries ----
  for (int p = 0; p < n_oltc; ++p) {
    const auto& d = problem.oltcs[p];
    const double slope = (d.a_max - 1.0) / d.tau_max;
    for (int t = 0; t < T; ++t) {
      b.add_row(idx_name("alink", t, p), 1.0, 1.0,
                {{out.a_col(p, t), 1.0}, {out.tau_col(p, t), -slope}});
      if (t > 0) {
        b.add_row(idx_name("ramp", t, p), -d.delta_to_max, d.delta_to_max,
                  {{out.tau_col(p, t), 1.0}, {out.tau_col(p, t - 1), -1.0}});
        b.add_row(idx_name("move_up", t, p), 0.0, lp::kInf,
                  {{out.m_col(p, t), 1.0},
                   {out.tau_col(p, t), -1.0},
                   {out.tau_col(p, t - 1), 1.0}});
        b.add_row(idx_name("move_dn", t, p), 0.0, lp::kInf,
                  {{out.m_col(p, t), 1.0},
                   {out.tau_col(p, t), 1.0},
                   {out.tau_col(p, t - 1), -1.0}});
      } else if (d.tau_prev) {
        const double prev = *d.tau_prev;
        b.add_row(idx_name("move_up", t, p), -prev, lp::kInf,
                  {{out.m_col(p, t), 1.0}, {out.tau_col(p, t), -1.0}});
        b.add_row(idx_name("move_dn", t, p), prev, lp::kInf,
                  {{out.m_col(p, t), 1.0}, {out.tau_col(p, t), 1.0}});
      }
    }
  }

  (void)n_full;
  out.lp = b.build();
  return out;
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

namespace {

class BuiltinBackend : public LpBackend {
 public:
  lp::LpSolution solve(const lp::LpInstance& inst, const lp::Basis* warm) override {
    return lp::solve_lp(inst, {}, warm);
  }
};

struct BbNode {
  double bound;
  long id;
  std::vector<int> tau_lb, tau_ub;
  lp::Basis basis;
};

struct NodeOrder {
  bool operator()(const BbNode* a, const BbNode* b) const {
    if (a->bound != b->bound) return a->bound > b->bound;  // min-heap on bound
    return a->id > b->id;
  }
};

double tau_prev_distance(const DispatchProblem& prob,
                         const std::vector<std::vector<int>>& sched) {
  double s = 0.0;
  for (size_t p = 0; p < prob.oltcs.size(); ++p) {
    const int ref = prob.oltcs[p].tau_prev.value_or(sched[p].empty() ? 0 : sched[p][0]);
    for (int tau : sched[p]) s += std::abs(tau - ref);
  }
  return s;
}

}  // namespace

DispatchSolution solve_milp(const DispatchProblem& problem,
                            const MilpOptions& opts) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(clock::now() - t_start).count();
  };

  AssembledDispatch asmb = assemble(problem);
  lp::LpInstance& inst = asmb.lp;
  const int T = asmb.n_steps;
  const int n_oltc = asmb.n_oltc;
  const int n_tau = n_oltc * T;

  BuiltinBackend builtin;
  LpBackend* backend = opts.backend ? opts.backend : &builtin;

  std::vector<double> root_lb(n_tau), root_ub(n_tau);
  for (int i = 0; i < n_tau; ++i) {
    root_lb[i] = inst.col_lb[asmb.tau_base + i];
    root_ub[i] = inst.col_ub[asmb.tau_base + i];
  }
  auto apply_bounds = [&](const std::vector<int>& lo, const std::vector<int>& hi) {
    for (int i = 0; i < n_tau; ++i) {
      inst.col_lb[asmb.tau_base + i] = lo[i];
      inst.col_ub[asmb.tau_base + i] = hi[i];
    }
  };

  std::ofstream log;
  if (!opts.log_csv_path.empty()) {
    log.open(opts.log_csv_path, std::ios::binary);
    if (log) log << "node,bound,incumbent,gap\n";
  }

  // --- fallback incumbent: hold tau at tau_prev (or 0) ---
  std::vector<int> hold_lo(n_tau), hold_hi(n_tau);
  for (int p = 0; p < n_oltc; ++p) {
    const auto& d = problem.oltcs[p];
    int hold = d.tau_prev.value_or(0);
    hold = std::clamp(hold, d.tau_min, d.tau_max);
    for (int t = 0; t < T; ++t) {
      hold_lo[p * T + t] = hold;
      hold_hi[p * T + t] = hold;
    }
  }
  apply_bounds(hold_lo, hold_hi);
  lp::LpSolution incumbent_lp = backend->solve(inst, nullptr);
  if (incumbent_lp.status != lp::LpStatus::kOptimal) {
    throw NumericError("dispatch fallback (hold taps) LP failed: " +
                       incumbent_lp.infeasible_row);
  }
  double incumbent_obj = incumbent_lp.objective;
  std::vector<int> incumbent_tau(hold_lo);
  std::string status = "fallback";
  int bb_nodes = 0;
  long lp_iters = incumbent_lp.iterations;

  auto tau_of_x = [&](const Eigen::VectorXd& x) {
    std::vector<int> tau(n_tau);
    for (int i = 0; i < n_tau; ++i) {
      tau[i] = static_cast<int>(std::lround(x[asmb.tau_base + i]));
    }
    return tau;
  };
  auto schedule_of = [&](const std::vector<int>& tau_flat) {
    std::vector<std::vector<int>> sched(n_oltc, std::vector<int>(T));
    for (int p = 0; p < n_oltc; ++p)
      for (int t = 0; t < T; ++t) sched[p][t] = tau_flat[p * T + t];
    return sched;
  };

  auto better_incumbent = [&](double obj, const std::vector<int>& tau_flat) {
    if (obj < incumbent_obj - 1e-9) return true;
    if (obj > incumbent_obj + 1e-9) return false;
    // tie break: least movement from tau_prev, then lexicographic
    const double da = tau_prev_distance(problem, schedule_of(tau_flat));
    const double db = tau_prev_distance(problem, schedule_of(incumbent_tau));
    if (da != db) return da < db;
    return tau_flat < incumbent_tau;
  };

  // --- best-bound search over the relaxation ---
  std::priority_queue<BbNode*, std::vector<BbNode*>, NodeOrder> open;
  std::vector<std::unique_ptr<BbNode>> pool;
  long next_id = 0;

  auto make_node = [&](double bound, std::vector<int> lo, std::vector<int> hi,
                       const lp::Basis& basis) {
    auto node = std::make_unique<BbNode>();
    node->bound = bound;
    node->id = next_id++;
    node->tau_lb = std::move(lo);
    node->tau_ub = std::move(hi);
    node->basis = basis;
    open.push(node.get());
    pool.push_back(std::move(node));
  };

  std::vector<int> root_lo(n_tau), root_hi(n_tau);
  for (int i = 0; i < n_tau; ++i) {
    root_lo[i] = static_cast<int>(root_lb[i]);
    root_hi[i] = static_cast<int>(root_ub[i]);
  }
  make_node(-lp::kInf, root_lo, root_hi, incumbent_lp.basis);

  const double int_tol = opts.int_tol;
  double best_open_bound = -lp::kInf;
  bool budget_hit = false;

  while (!open.empty()) {
    if (elapsed_s() > opts.time_budget_s) {
      budget_hit = true;
      best_open_bound = open.top()->bound;
      break;
    }
    BbNode* node = open.top();
    open.pop();
    if (node->bound > incumbent_obj - 1e-9) continue;  // pruned

    apply_bounds(node->tau_lb, node->tau_ub);
    lp::LpSolution rel = backend->solve(inst, &node->basis);
    ++bb_nodes;
    lp_iters += rel.iterations;
    if (rel.status == lp::LpStatus::kInfeasible) continue;
    if (rel.status != lp::LpStatus::kOptimal) continue;  // treat as pruned
    if (rel.objective > incumbent_obj - 1e-9) {
      if (log) {
        log << bb_nodes << "," << rel.objective << "," << incumbent_obj << ","
            << std::max(0.0, incumbent_obj - rel.objective) << "\n";
      }
      continue;
    }

    // fractionality of tau columns
    int branch_i = -1;
    double worst_frac = int_tol;
    for (int i = 0; i < n_tau; ++i) {
      const double v = rel.x[asmb.tau_base + i];
      const double frac = std::abs(v - std::lround(v));
      if (frac > worst_frac) {
        worst_frac = frac;
        branch_i = i;
      }
    }

    if (branch_i < 0) {
      // integral: fix and re-solve for an exact schedule optimum
      std::vector<int> tau_flat = tau_of_x(rel.x);
      apply_bounds(tau_flat, tau_flat);
      lp::LpSolution fixed = backend->solve(inst, &rel.basis);
      lp_iters += fixed.iterations;
      if (fixed.status == lp::LpStatus::kOptimal &&
          better_incumbent(fixed.objective, tau_flat)) {
        incumbent_obj = fixed.objective;
        incumbent_tau = tau_flat;
        incumbent_lp = fixed;
        status = "optimal";
      }
      if (log) {
        log << bb_nodes << "," << rel.objective << "," << incumbent_obj << ","
            << std::max(0.0, incumbent_obj - rel.objective) << "\n";
      }
      continue;
    }

    if (log) {
      log << bb_nodes << "," << rel.objective << "," << incumbent_obj << ","
          << std::max(0.0, incumbent_obj - rel.objective) << "\n";
    }

    const double v = rel.x[asmb.tau_base + branch_i];
    const int floor_v = static_cast<int>(std::floor(v));
    // down child first (lower id wins ties in the heap)
    {
      std::vector<int> lo = node->tau_lb, hi = node->tau_ub;
      hi[branch_i] = std::min(hi[branch_i], floor_v);
      if (lo[branch_i] <= hi[branch_i]) {
        make_node(rel.objective, std::move(lo), std::move(hi), rel.basis);
      }
    }
    {
      std::vector<int> lo = node->tau_lb, hi = node->tau_ub;
      lo[branch_i] = std::max(lo[branch_i], floor_v + 1);
      if (lo[branch_i] <= hi[branch_i]) {
        make_node(rel.objective, std::move(lo), std::move(hi), rel.basis);
      }
    }
  }

  if (!budget_hit) {
    best_open_bound = incumbent_obj;  // proven
    if (status == "fallback") status = "optimal";  // hold schedule was optimal
  } else {
    status = "budget";
  }

  // --- package the incumbent ---
  DispatchSolution sol;
  sol.tap_schedule = schedule_of(incumbent_tau);
  sol.objective = incumbent_obj;
  sol.gap = budget_hit ? std::max(0.0, incumbent_obj - best_open_bound) : 0.0;
  sol.status = status;
  sol.bb_nodes = bb_nodes;
  sol.lp_iterations = lp_iters;
  sol.lp_x = incumbent_lp.x;

  const int nr = asmb.nr;
  const int n_full = problem.sens[0].y0.n_nodes();
  sol.vmag_pred.resize(T, n_full);
  for (int t = 0; t < T; ++t) {
    const auto& sm = problem.sens[t];
    for (int n = 0; n < n_full; ++n) sol.vmag_pred(t, n) = sm.vmag0[n];
    for (int k = 0; k < nr; ++k) {
      const int n = asmb.r2f[k];
      sol.vmag_pred(t, n) += sm.coeff_d[n] * incumbent_lp.x[asmb.col_dvd(t, k)] +
                             sm.coeff_q[n] * incumbent_lp.x[asmb.col_dvq(t, k)];
    }
  }
  sol.si_dq_pu.resize(T, asmb.n_pv);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < asmb.n_pv; ++j) {
      sol.si_dq_pu(t, j) = incumbent_lp.row_activity[asmb.dq_row_at(t, j)];
    }
  }

  sol.j1 = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < nr; ++k) {
      sol.j1 += std::abs(sol.vmag_pred(t, asmb.r2f[k]) - 1.0);
    }
  }
  sol.j2 = 0.0;
  for (int p = 0; p < n_oltc; ++p) {
    if (problem.oltcs[p].tau_prev) {
      sol.j2 += std::abs(sol.tap_schedule[p][0] - *problem.oltcs[p].tau_prev);
    }
    for (int t = 1; t < T; ++t) {
      sol.j2 += std::abs(sol.tap_schedule[p][t] - sol.tap_schedule[p][t - 1]);
    }
  }

  // restore root bounds on the (caller-visible) instance
  apply_bounds(root_lo, root_hi);
  return sol;
}

SetpointExtraction extract_setpoints(const DispatchSolution& sol,
                                     const DispatchProblem& problem,
                                     const FeederModel& model,
                                     const Eigen::MatrixXd& unit_qmax_kvar) {
  const int T = problem.n_steps;
  const int n_units = static_cast<int>(model.pv_units.size());
  if (unit_qmax_kvar.rows() != T || unit_qmax_kvar.cols() != n_units) {
    throw NumericError("unit Q_max matrix dimensions mismatch");
  }

  // unit -> pv node slot
  std::vector<int> slot_of_unit(n_units, -1);
  for (int u = 0; u < n_units; ++u) {
    const int n = model.node_index(model.pv_units[u].bus, model.pv_units[u].phase);
    for (size_t j = 0; j < problem.pv_nodes.size(); ++j) {
      if (problem.pv_nodes[j] == n) {
        slot_of_unit[u] = static_cast<int>(j);
        break;
      }
    }
  }

  SetpointExtraction out;
  out.steps.resize(T);
  for (int t = 0; t < T; ++t) {
    auto& cmd = out.steps[t];
    for (size_t p = 0; p < problem.oltcs.size(); ++p) {
      cmd.taps.push_back(sol.tap_schedule[p][t]);
    }
    cmd.q_set_kvar.assign(n_units, 0.0);
    // per-node share denominator
    std::vector<double> node_qmax(problem.pv_nodes.size(), 0.0);
    for (int u = 0; u < n_units; ++u) {
      if (slot_of_unit[u] >= 0) node_qmax[slot_of_unit[u]] += unit_qmax_kvar(t, u);
    }
    for (int u = 0; u < n_units; ++u) {
      const int j = slot_of_unit[u];
      if (j < 0) continue;
      const double node_q_kvar =
          sol.si_dq_pu(t, j) * model.s_base_kva();  // Q0 = 0 (unity pf basis)
      double share = 0.0;
      if (node_qmax[j] > 0.0) {
        share = unit_qmax_kvar(t, u) / node_qmax[j];
      } else {
        // no capability: equal split of what should be ~0
        int cnt = 0;
        for (int v = 0; v < n_units; ++v) cnt += slot_of_unit[v] == j;
        share = 1.0 / std::max(1, cnt);
      }
      double q = node_q_kvar * share;
      const double cap = unit_qmax_kvar(t, u);
      if (q > cap + 1e-6 * (1.0 + cap) || q < -cap - 1e-6 * (1.0 + cap)) {
        ++out.clip_events;
      }
      cmd.q_set_kvar[u] = std::clamp(q, -cap, cap);
    }
  }
  return out;
}

}  // namespace gv
