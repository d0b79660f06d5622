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

#include <doctest.h>

#include <functional>

#include "gridvolt/milp.hpp"
#include "gridvolt/rng.hpp"
#include "support/dispatch_fixtures.hpp"

using namespace gv;
using gvtest::make_dispatch;

TEST_CASE("assembled variable count matches the documented formula") {
  // columns = 4*N*T (physics) + N*T (deviation) + |P|*T*2 (ratio + tap)
  //           + |P|*T (move auxiliaries)
  auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, 10, 0.05, 1.0, 0.15,
                         0, 16, 1);
  auto a = assemble(s.problem);
  const int nr = a.nr;
  const int T = 10, P = 2;
  CHECK(nr == s.model.n_nodes() - 1);
  CHECK(a.lp.n_cols == 4 * nr * T + nr * T + P * T * 2 + P * T);
}

TEST_CASE("no integer variables reduces to the LP optimum") {
  auto s = make_dispatch(gvtest::two_bus_json(), {}, 2, 0.0, 1.0, 0.15,
                         std::nullopt, 16, 1);
  auto a = assemble(s.problem);
  auto lp_sol = lp::solve_lp(a.lp);
  REQUIRE(lp_sol.status == lp::LpStatus::kOptimal);
  auto milp_sol = solve_milp(s.problem);
  CHECK(milp_sol.objective == doctest::Approx(lp_sol.objective).epsilon(1e-9));
  CHECK(milp_sol.status == "optimal");
  CHECK(milp_sol.gap == 0.0);
}

TEST_CASE("single-step single-OLTC instance matches tap enumeration") {
  auto s = make_dispatch(gvtest::oltc_chain_json(), {0}, 1, 0.0, 1.0, 0.15, 0,
                         2, 4, 0.0);
  const double oracle = gvtest::enumerate_dispatch_best(s.problem);
  auto sol = solve_milp(s.problem);
  CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(sol.status == "optimal");
}

TEST_CASE("randomized small instances equal the enumeration oracle") {
  Rng rng(424242);
  for (int trial = 0; trial < 12; ++trial) {
    const int T = 1 + static_cast<int>(rng.uniform_int(0, 2));
    const int range = T <= 1 ? 2 : 1;
    const int prev = static_cast<int>(rng.uniform_int(-1, 1));
    const double qmax = rng.uniform(0.0, 0.08);
    const double w2 = rng.uniform(0.0, 0.3);
    const int dmax = 1 + static_cast<int>(rng.uniform_int(0, 2));
    auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, T, qmax, 1.0, w2,
                           prev, range, dmax, rng.uniform(0.0, 0.1));
    const double oracle = gvtest::enumerate_dispatch_best(s.problem);
    auto sol = solve_milp(s.problem);
    INFO("trial ", trial, " T=", T, " prev=", prev);
    CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("monotone weight response: larger w2 never increases J2") {
  double last_j2 = -1.0;
  for (double w2 : {0.001, 0.01, 0.05, 0.15}) {
    auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, 3, 0.03, 1.0, w2,
                           0, 2, 1, 0.12);
    auto sol = solve_milp(s.problem);
    REQUIRE(sol.status == "optimal");
    if (last_j2 >= 0.0) CHECK(sol.j2 <= last_j2 + 1e-9);
    last_j2 = sol.j2;
  }
}

TEST_CASE("returned solution satisfies every assembled constraint") {
  auto s = make_dispatch(gvtest::two_oltc_json(), {1, 0}, 3, 0.05, 1.0, 0.15,
                         1, 3, 1, 0.1);
  auto a = assemble(s.problem);
  auto sol = solve_milp(s.problem);
  REQUIRE(sol.lp_x.size() == a.lp.n_cols);
  Eigen::VectorXd act = Eigen::VectorXd::Zero(a.lp.n_rows);
  for (int j = 0; j < a.lp.n_cols; ++j) {
    CHECK(sol.lp_x[j] >= a.lp.col_lb[j] - 1e-6);
    CHECK(sol.lp_x[j] <= a.lp.col_ub[j] + 1e-6);
    for (int k = a.lp.col_ptr[j]; k < a.lp.col_ptr[j + 1]; ++k) {
      act[a.lp.row_idx[k]] += a.lp.value[k] * sol.lp_x[j];
    }
  }
  for (int r = 0; r < a.lp.n_rows; ++r) {
    CHECK(act[r] >= a.lp.row_lb[r] - 1e-6);
    CHECK(act[r] <= a.lp.row_ub[r] + 1e-6);
  }
  // integral taps within bounds and ramp limits
  for (size_t p = 0; p < s.problem.oltcs.size(); ++p) {
    const auto& d = s.problem.oltcs[p];
    int prev = *d.tau_prev;
    for (int t = 0; t < s.problem.n_steps; ++t) {
      const int tau = sol.tap_schedule[p][t];
      CHECK(tau >= d.tau_min);
      CHECK(tau <= d.tau_max);
      CHECK(std::abs(tau - prev) <= d.delta_to_max);
      prev = tau;
    }
  }
}

TEST_CASE("LP relaxation bounds the MILP incumbent from below") {
  auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, 2, 0.02, 1.0, 0.1,
                         0, 2, 1, 0.09);
  auto a = assemble(s.problem);
  auto relax = lp::solve_lp(a.lp);
  REQUIRE(relax.status == lp::LpStatus::kOptimal);
  auto sol = solve_milp(s.problem);
  CHECK(relax.objective <= sol.objective + 1e-7);
}

TEST_CASE("zero perturbation freeze reproduces the base deviation") {
  // Q_max = 0 and taps frozen at tau_prev: optimum is w1 * sum ||V0|-1|.
  auto s = make_dispatch(gvtest::two_oltc_json(), {2, 2}, 2, 0.0, 1.0, 0.15,
                         2, 16, 0, 0.0);
  auto sol = solve_milp(s.problem);
  double dev = 0.0;
  const auto& sm = s.problem.sens[0];
  for (int k = 0; k < sm.y0.n_reduced(); ++k) {
    dev += std::abs(sm.vmag0[sm.y0.reduced_to_full()[k]] - 1.0);
  }
  dev *= s.problem.n_steps * s.problem.w1;
  CHECK(sol.objective == doctest::Approx(dev).epsilon(1e-7));
  CHECK(sol.j2 == 0.0);
}

TEST_CASE("determinism of the full branch and bound") {
  auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, 3, 0.04, 1.0, 0.02,
                         0, 2, 1, 0.11);
  auto a = solve_milp(s.problem);
  auto b = solve_milp(s.problem);
  CHECK(a.objective == b.objective);
  CHECK(a.tap_schedule == b.tap_schedule);
  CHECK(a.bb_nodes == b.bb_nodes);
}

TEST_CASE("extract_setpoints maps node dispatch to unit commands") {
  auto s = make_dispatch(gvtest::two_oltc_json(), {0, 0}, 2, 0.05, 1.0, 0.15,
                         0, 2, 1, 0.05);
  auto sol = solve_milp(s.problem);
  const int T = s.problem.n_steps;
  const int n_units = static_cast<int>(s.model.pv_units.size());
  Eigen::MatrixXd qmax_kvar = Eigen::MatrixXd::Constant(
      T, n_units, 0.05 * s.model.s_base_kva());

  SUBCASE("solution commands") {
    auto ext = extract_setpoints(sol, s.problem, s.model, qmax_kvar);
    REQUIRE(static_cast<int>(ext.steps.size()) == T);
    CHECK(ext.clip_events == 0);
    for (int t = 0; t < T; ++t) {
      CHECK(ext.steps[t].taps.size() == s.problem.oltcs.size());
      const double q_node_kvar = sol.si_dq_pu(t, 0) * s.model.s_base_kva();
      CHECK(ext.steps[t].q_set_kvar[0] == doctest::Approx(q_node_kvar));
    }
  }

  SUBCASE("zero dispatch means unity power factor everywhere") {
    DispatchSolution zero = sol;
    zero.si_dq_pu.setZero();
    auto ext = extract_setpoints(zero, s.problem, s.model, qmax_kvar);
    for (const auto& step : ext.steps) {
      for (double q : step.q_set_kvar) CHECK(q == 0.0);
    }
  }

  SUBCASE("dispatch at the bound maps to +Q_max kvar") {
    DispatchSolution bound = sol;
    bound.si_dq_pu.setConstant(0.05);
    auto ext = extract_setpoints(bound, s.problem, s.model, qmax_kvar);
    CHECK(ext.steps[0].q_set_kvar[0] ==
          doctest::Approx(0.05 * s.model.s_base_kva()));
  }
}
