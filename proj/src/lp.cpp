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

#include "gridvolt/lp.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>

namespace gv::lp {

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

int LpBuilder::add_col(std::string name, double lb, double ub, double obj,
                       bool integer) {
  if (lb > ub) throw NumericError("column '" + name + "': lb > ub");
  col_names_.push_back(std::move(name));
  col_lb_.push_back(lb);
  col_ub_.push_back(ub);
  obj_.push_back(obj);
  integer_.push_back(integer ? 1 : 0);
  return n_cols() - 1;
}

int LpBuilder::add_row(std::string name, double lb, double ub,
                       const std::vector<std::pair<int, double>>& entries) {
  if (lb > ub) throw NumericError("row '" + name + "': lb > ub");
  const int r = n_rows();
  row_names_.push_back(std::move(name));
  row_lb_.push_back(lb);
  row_ub_.push_back(ub);
  for (const auto& [c, v] : entries) {
    if (c < 0 || c >= n_cols()) {
      throw NumericError("row entry references unknown column " + std::to_string(c));
    }
    if (v != 0.0) {
      trip_row_.push_back(r);
      trip_col_.push_back(c);
      trip_val_.push_back(v);
    }
  }
  return r;
}

LpInstance LpBuilder::build() const {
  LpInstance lp;
  lp.n_rows = n_rows();
  lp.n_cols = n_cols();
  lp.obj = obj_;
  lp.obj_offset = offset_;
  lp.col_lb = col_lb_;
  lp.col_ub = col_ub_;
  lp.row_lb = row_lb_;
  lp.row_ub = row_ub_;
  lp.integer_mark = integer_;
  lp.col_name = col_names_;
  lp.row_name = row_names_;

  // CSC with duplicates summed; deterministic (col, row) order.
  const size_t nz = trip_val_.size();
  std::vector<int> order(nz);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (trip_col_[a] != trip_col_[b]) return trip_col_[a] < trip_col_[b];
    return trip_row_[a] < trip_row_[b];
  });
  lp.col_ptr.assign(lp.n_cols + 1, 0);
  for (size_t i = 0; i < nz; ++i) {
    const int k = order[i];
    if (i > 0) {
      const int prev = order[i - 1];
      if (trip_col_[prev] == trip_col_[k] && trip_row_[prev] == trip_row_[k]) {
        lp.value.back() += trip_val_[k];
        continue;
      }
    }
    lp.row_idx.push_back(trip_row_[k]);
    lp.value.push_back(trip_val_[k]);
    lp.col_ptr[trip_col_[k] + 1]++;
  }
  for (int c = 0; c < lp.n_cols; ++c) lp.col_ptr[c + 1] += lp.col_ptr[c];
  return lp;
}

// ---------------------------------------------------------------------------
// Bounded-variable primal simplex
// ---------------------------------------------------------------------------

namespace {

constexpr double kZeroTol = 1e-12;

struct Eta {
  int r;  // pivot row position
  std::vector<std::pair<int, double>> w;  // sparse spike, includes (r, w_r)
  double wr;
};

class Simplex {
 public:
  Simplex(const LpInstance& lp, const SimplexOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.n_rows), n_(lp.n_cols), nt_(m_ + n_) {
    lb_.resize(nt_);
    ub_.resize(nt_);
    cost_.setZero(nt_);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lp.col_lb[j];
      ub_[j] = lp.col_ub[j];
      cost_[j] = lp.obj[j];
    }
    for (int r = 0; r < m_; ++r) {
      lb_[n_ + r] = lp.row_lb[r];
      ub_[n_ + r] = lp.row_ub[r];
    }
    if (opts_.max_iterations < 0) {
      opts_.max_iterations =
          std::max<long>(20000, 60L * (m_ + n_));
    }
  }

  LpSolution run(const Basis* warm) {
    init_basis(warm);
    factorize();
    compute_basics();

    LpSolution sol;
    // Phase 1: drive basic infeasibilities to zero.
    if (max_violation() > opts_.feas_tol) {
      const bool feasible = iterate(/*phase1=*/true);
      if (!feasible || max_violation() > opts_.feas_tol * 10.0) {
        sol.status = iter_ >= opts_.max_iterations ? LpStatus::kIterLimit
                                                   : LpStatus::kInfeasible;
        finish(sol);
        sol.infeasible_row = worst_violation_name();
        return sol;
      }
    }
    // Phase 2: optimize the real objective.
    const bool done = iterate(/*phase1=*/false);
    if (!done) {
      sol.status = unbounded_ ? LpStatus::kUnbounded : LpStatus::kIterLimit;
      if (unbounded_) sol.infeasible_row = unbounded_note_;
      finish(sol);
      return sol;
    }
    sol.status = LpStatus::kOptimal;
    finish(sol);
    return sol;
  }

 private:
  template <class F>
  void for_col(int j, F&& f) const {
    if (j < n_) {
      for (int k = lp_.col_ptr[j]; k < lp_.col_ptr[j + 1]; ++k) {
        f(lp_.row_idx[k], lp_.value[k]);
      }
    } else {
      f(j - n_, -1.0);
    }
  }

  void init_basis(const Basis* warm) {
    state_.assign(nt_, VarState::kAtLower);
    basic_var_.clear();
    x_.setZero(nt_);

    bool warm_ok = false;
    if (warm && static_cast<int>(warm->state.size()) == nt_) {
      int nb = 0;
      for (int j = 0; j < nt_; ++j) {
        if (warm->state[j] == VarState::kBasic) ++nb;
      }
      if (nb == m_) {
        state_ = warm->state;
        warm_ok = true;
      }
    }
    if (!warm_ok) {
      // all-logical start
      for (int r = 0; r < m_; ++r) state_[n_ + r] = VarState::kBasic;
      for (int j = 0; j < n_; ++j) state_[j] = default_nonbasic_state(j);
    }

    for (int j = 0; j < nt_; ++j) {
      if (state_[j] == VarState::kBasic) {
        basic_var_.push_back(j);
      } else {
        sanitize_nonbasic(j);
      }
    }
  }

  VarState default_nonbasic_state(int j) const {
    const bool lo = std::isfinite(lb_[j]), hi = std::isfinite(ub_[j]);
    if (!lo && !hi) return VarState::kFreeZero;
    if (!lo) return VarState::kAtUpper;
    if (!hi) return VarState::kAtLower;
    // both finite: nearest to zero
    return std::abs(lb_[j]) <= std::abs(ub_[j]) ? VarState::kAtLower
                                                : VarState::kAtUpper;
  }

  void sanitize_nonbasic(int j) {
    switch (state_[j]) {
      case VarState::kAtLower:
        if (!std::isfinite(lb_[j])) state_[j] = default_nonbasic_state(j);
        break;
      case VarState::kAtUpper:
        if (!std::isfinite(ub_[j])) state_[j] = default_nonbasic_state(j);
        break;
      case VarState::kFreeZero:
        if (std::isfinite(lb_[j]) || std::isfinite(ub_[j])) {
          state_[j] = default_nonbasic_state(j);
        }
        break;
      default:
        break;
    }
    x_[j] = nonbasic_value(j);
  }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::kAtLower: return lb_[j];
      case VarState::kAtUpper: return ub_[j];
      default: return 0.0;
    }
  }

  void factorize() {
    if (m_ == 0) return;
    bmat_.resize(m_, m_);
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < m_; ++k) {
      for_col(basic_var_[k],
              [&](int r, double v) { trips.emplace_back(r, k, v); });
    }
    bmat_.setFromTriplets(trips.begin(), trips.end());
    lu_.solver = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu_.solver->analyzePattern(bmat_);
    lu_.solver->factorize(bmat_);
    if (lu_.solver->info() != Eigen::Success) {
      if (reset_count_++ > 2) {
        throw NumericError("LP basis repeatedly singular");
      }
      // fall back to the always-valid logical basis
      for (int j = 0; j < n_; ++j) {
        if (state_[j] == VarState::kBasic) {
          state_[j] = default_nonbasic_state(j);
          sanitize_nonbasic(j);
        }
      }
      basic_var_.clear();
      for (int r = 0; r < m_; ++r) {
        state_[n_ + r] = VarState::kBasic;
        basic_var_.push_back(n_ + r);
      }
      factorize();
      return;
    }
    etas_.clear();
  }

  Eigen::VectorXd ftran(const Eigen::VectorXd& rhs) const {
    if (m_ == 0) return rhs;
    Eigen::VectorXd z = lu_.solver->solve(rhs);
    for (const auto& e : etas_) {
      double zr = z[e.r] / e.wr;
      if (zr != 0.0) {
        for (const auto& [i, wi] : e.w) z[i] -= wi * zr;
      }
      z[e.r] = zr;
    }
    return z;
  }

  Eigen::VectorXd btran(const Eigen::VectorXd& c) const {
    if (m_ == 0) return c;
    // y = B0^-T E1^-T ... Ek^-T c ; etas applied in reverse order.
    Eigen::VectorXd z = c;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = z[it->r];
      for (const auto& [i, wi] : it->w) acc -= wi * z[i];
      z[it->r] = acc / it->wr;
    }
    return lu_.solver->adjoint().solve(z);
  }

  void compute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < nt_; ++j) {
      if (state_[j] == VarState::kBasic) continue;
      const double xj = x_[j];
      if (xj == 0.0) continue;
      for_col(j, [&](int r, double v) { rhs[r] -= v * xj; });
    }
    Eigen::VectorXd xb = ftran(rhs);
    for (int k = 0; k < m_; ++k) x_[basic_var_[k]] = xb[k];
  }

  double violation(int j) const {
    if (x_[j] < lb_[j]) return lb_[j] - x_[j];
    if (x_[j] > ub_[j]) return x_[j] - ub_[j];
    return 0.0;
  }

  double max_violation() const {
    double worst = 0.0;
    for (int k = 0; k < m_; ++k) {
      worst = std::max(worst, violation(basic_var_[k]));
    }
    return worst;
  }

  std::string worst_violation_name() const {
    double worst = -1.0;
    int jw = -1;
    for (int k = 0; k < m_; ++k) {
      const double v = violation(basic_var_[k]);
      if (v > worst) {
        worst = v;
        jw = basic_var_[k];
      }
    }
    if (jw < 0) return "";
    if (jw >= n_) {
      return lp_.row_name.empty() ? "row " + std::to_string(jw - n_)
                                  : lp_.row_name[jw - n_];
    }
    return lp_.col_name.empty() ? "col " + std::to_string(jw)
                                : "column " + lp_.col_name[jw];
  }

  // Phase-aware cost of the current basis.
  Eigen::VectorXd basis_cost(bool phase1) const {
    Eigen::VectorXd c(m_);
    for (int k = 0; k < m_; ++k) {
      const int j = basic_var_[k];
      if (phase1) {
        if (x_[j] > ub_[j] + opts_.feas_tol) c[k] = 1.0;
        else if (x_[j] < lb_[j] - opts_.feas_tol) c[k] = -1.0;
        else c[k] = 0.0;
      } else {
        c[k] = cost_[j];
      }
    }
    return c;
  }

  // Main loop for one phase. Returns true when the phase reached its goal
  // (feasibility for phase 1, optimality for phase 2).
  bool iterate(bool phase1) {
    int stall_refactors = 0;
    while (iter_ < opts_.max_iterations) {
      if (phase1 && max_violation() <= opts_.feas_tol) return true;

      Eigen::VectorXd y = btran(basis_cost(phase1));

      // pricing
      int q = -1;
      double best = 0.0;
      int sigma = 0;
      for (int j = 0; j < nt_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        if (lb_[j] == ub_[j]) continue;  // fixed
        double d = (phase1 ? 0.0 : cost_[j]);
        for_col(j, [&](int r, double v) { d -= y[r] * v; });
        int s = 0;
        if (state_[j] == VarState::kAtLower && d < -opts_.opt_tol) s = 1;
        else if (state_[j] == VarState::kAtUpper && d > opts_.opt_tol) s = -1;
        else if (state_[j] == VarState::kFreeZero && std::abs(d) > opts_.opt_tol) {
          s = d < 0 ? 1 : -1;
        }
        if (s == 0) continue;
        if (bland_) { q = j; sigma = s; break; }
        if (std::abs(d) > best + kZeroTol) {
          best = std::abs(d);
          q = j;
          sigma = s;
        }
      }
      if (q < 0) {
        return phase1 ? max_violation() <= opts_.feas_tol : true;
      }

      // FTRAN the entering column
      Eigen::VectorXd aq = Eigen::VectorXd::Zero(m_);
      for_col(q, [&](int r, double v) { aq[r] += v; });
      Eigen::VectorXd w = ftran(aq);

      // ratio test (two passes, Harris-style pivot preference)
      const double own_gap =
          (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q]
                                                           : kInf;
      double t_strict = own_gap;
      for (int k = 0; k < m_; ++k) {
        const double delta = -sigma * w[k];
        if (std::abs(delta) < opts_.pivot_tol) continue;
        const int i = basic_var_[k];
        double target;
        if (delta > 0) {
          target = (phase1 && x_[i] < lb_[i] - opts_.feas_tol) ? lb_[i] : ub_[i];
          if (!std::isfinite(target) || x_[i] > ub_[i] + opts_.feas_tol) continue;
        } else {
          target = (phase1 && x_[i] > ub_[i] + opts_.feas_tol) ? ub_[i] : lb_[i];
          if (!std::isfinite(target) || x_[i] < lb_[i] - opts_.feas_tol) continue;
        }
        const double t = (target - x_[i]) / delta;
        if (t < t_strict) t_strict = std::max(t, 0.0);
      }

      if (!std::isfinite(t_strict)) {
        if (phase1) {
          // cannot happen for a bounded phase-1 objective; numerical trouble
          if (++stall_refactors > 3) {
            throw NumericError("phase-1 ray detected; instance badly scaled");
          }
          factorize();
          compute_basics();
          continue;
        }
        unbounded_ = true;
        unbounded_note_ =
            "unbounded direction on column " +
            (q < n_ ? (lp_.col_name.empty() ? std::to_string(q) : lp_.col_name[q])
                    : "logical " + std::to_string(q - n_));
        return false;
      }

      // choose leaving among events within tolerance of t_strict
      int leave_k = -1;
      double leave_target = 0.0;
      double best_pivot = 0.0;
      const double t_window = t_strict + 1e-9 * (1.0 + std::abs(t_strict));
      for (int k = 0; k < m_; ++k) {
        const double delta = -sigma * w[k];
        if (std::abs(delta) < opts_.pivot_tol) continue;
        const int i = basic_var_[k];
        double target;
        if (delta > 0) {
          target = (phase1 && x_[i] < lb_[i] - opts_.feas_tol) ? lb_[i] : ub_[i];
          if (!std::isfinite(target) || x_[i] > ub_[i] + opts_.feas_tol) continue;
        } else {
          target = (phase1 && x_[i] > ub_[i] + opts_.feas_tol) ? ub_[i] : lb_[i];
          if (!std::isfinite(target) || x_[i] < lb_[i] - opts_.feas_tol) continue;
        }
        const double t = std::max((target - x_[i]) / delta, 0.0);
        if (t <= t_window) {
          if (std::abs(w[k]) > best_pivot + kZeroTol ||
              (std::abs(std::abs(w[k]) - best_pivot) <= kZeroTol && leave_k >= 0 &&
               basic_var_[k] < basic_var_[leave_k])) {
            best_pivot = std::abs(w[k]);
            leave_k = k;
            leave_target = target;
          }
        }
      }

      ++iter_;
      if (leave_k < 0 || own_gap <= t_strict + 1e-12) {
        // bound flip: entering variable traverses to its other bound
        const double t = own_gap;
        x_[q] = (sigma > 0) ? ub_[q] : lb_[q];
        state_[q] = (sigma > 0) ? VarState::kAtUpper : VarState::kAtLower;
        for (int k = 0; k < m_; ++k) {
          if (w[k] != 0.0) x_[basic_var_[k]] -= sigma * t * w[k];
        }
        note_progress(t);
        continue;
      }

      const double t =
          std::max((leave_target - x_[basic_var_[leave_k]]) / (-sigma * w[leave_k]),
                   0.0);
      // update values
      x_[q] = nonbasic_value(q) + sigma * t;
      for (int k = 0; k < m_; ++k) {
        if (w[k] != 0.0) x_[basic_var_[k]] -= sigma * t * w[k];
      }
      const int leaving = basic_var_[leave_k];
      x_[leaving] = leave_target;  // snap
      state_[leaving] =
          (leave_target == ub_[leaving] && std::isfinite(ub_[leaving]))
              ? VarState::kAtUpper
              : VarState::kAtLower;
      state_[q] = VarState::kBasic;
      basic_var_[leave_k] = q;

      // eta update or refactorization
      if (static_cast<int>(etas_.size()) >= opts_.refactor_interval) {
        factorize();
        compute_basics();
      } else {
        Eta e;
        e.r = leave_k;
        e.wr = w[leave_k];
        for (int k = 0; k < m_; ++k) {
          if (k != leave_k && std::abs(w[k]) > kZeroTol) {
            e.w.emplace_back(k, w[k]);
          }
        }
        etas_.push_back(std::move(e));
      }
      note_progress(t);
    }
    return false;  // iteration limit
  }

  void note_progress(double t) {
    if (t > 1e-9) {
      degen_streak_ = 0;
      bland_ = false;
    } else if (++degen_streak_ > 500) {
      bland_ = true;
    }
  }

  void finish(LpSolution& sol) {
    sol.iterations = static_cast<int>(iter_);
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j) sol.x[j] = x_[j];
    sol.row_activity.resize(m_);
    for (int r = 0; r < m_; ++r) sol.row_activity[r] = x_[n_ + r];
    sol.objective = lp_.obj_offset;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.obj[j] * x_[j];
    sol.dual = btran(basis_cost(/*phase1=*/false));
    sol.basis.state = state_;
  }

  const LpInstance& lp_;
  SimplexOptions opts_;
  int m_, n_, nt_;
  Eigen::VectorXd lb_, ub_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<int> basic_var_;
  Eigen::SparseMatrix<double> bmat_;
  struct {
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> solver;
  } lu_;
  std::vector<Eta> etas_;
  long iter_ = 0;
  int degen_streak_ = 0;
  int reset_count_ = 0;
  bool bland_ = false;
  bool unbounded_ = false;
  std::string unbounded_note_;
};

}  // namespace

LpSolution solve_lp(const LpInstance& lp, const SimplexOptions& opts,
                    const Basis* warm_start) {
  Simplex s(lp, opts);
  return s.run(warm_start);
}

// ---------------------------------------------------------------------------
// LP-format writer
// ---------------------------------------------------------------------------

namespace {
std::string col_label(const LpInstance& lp, int j) {
  if (!lp.col_name.empty() && !lp.col_name[j].empty()) return lp.col_name[j];
  return "x" + std::to_string(j);
}
}  // namespace

void write_lp_format(const LpInstance& lp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  out << "\\ gridvolt dispatch instance\nMinimize\n obj:";
  bool first = true;
  for (int j = 0; j < lp.n_cols; ++j) {
    if (lp.obj[j] == 0.0) continue;
    out << (lp.obj[j] >= 0 && !first ? " + " : " ") << num(lp.obj[j]) << " "
        << col_label(lp, j);
    first = false;
  }
  if (first) out << " 0 " << col_label(lp, 0);
  out << "\nSubject To\n";

  // expand columns to rows
  std::vector<std::vector<std::pair<int, double>>> rows(lp.n_rows);
  for (int j = 0; j < lp.n_cols; ++j) {
    for (int k = lp.col_ptr[j]; k < lp.col_ptr[j + 1]; ++k) {
      rows[lp.row_idx[k]].emplace_back(j, lp.value[k]);
    }
  }
  auto row_label = [&](int r) {
    if (!lp.row_name.empty() && !lp.row_name[r].empty()) return lp.row_name[r];
    return "r" + std::to_string(r);
  };
  auto emit_expr = [&](int r) {
    bool f = true;
    for (const auto& [j, v] : rows[r]) {
      out << (v >= 0 && !f ? " + " : " ") << num(v) << " " << col_label(lp, j);
      f = false;
    }
    if (f) out << " 0 " << col_label(lp, 0);
  };
  for (int r = 0; r < lp.n_rows; ++r) {
    const double lo = lp.row_lb[r], hi = lp.row_ub[r];
    if (lo == hi) {
      out << " " << row_label(r) << ":";
      emit_expr(r);
      out << " = " << num(lo) << "\n";
    } else {
      if (std::isfinite(lo)) {
        out << " " << row_label(r) << "_lo:";
        emit_expr(r);
        out << " >= " << num(lo) << "\n";
      }
      if (std::isfinite(hi)) {
        out << " " << row_label(r) << "_hi:";
        emit_expr(r);
        out << " <= " << num(hi) << "\n";
      }
    }
  }

  out << "Bounds\n";
  for (int j = 0; j < lp.n_cols; ++j) {
    const double lo = lp.col_lb[j], hi = lp.col_ub[j];
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      out << " " << col_label(lp, j) << " free\n";
    } else {
      out << " " << (std::isfinite(lo) ? num(lo) : "-inf") << " <= "
          << col_label(lp, j) << " <= " << (std::isfinite(hi) ? num(hi) : "+inf")
          << "\n";
    }
  }
  bool any_int = false;
  for (int j = 0; j < lp.n_cols; ++j) {
    if (lp.integer_mark[j]) {
      if (!any_int) out << "Generals\n";
      any_int = true;
      out << " " << col_label(lp, j) << "\n";
    }
  }
  out << "End\n";
}

}  // namespace gv::lp
