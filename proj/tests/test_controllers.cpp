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

#include "gridvolt/controllers.hpp"
#include "support/fixtures.hpp"

using namespace gv;

TEST_CASE("volt-var curve evaluation") {
  auto curve = VoltVarCurve::recommended_default();
  curve.validate();

  SUBCASE("deadband gives zero") {
    CHECK(volt_var_q(curve, 1.0, 200.0) == 0.0);
    CHECK(volt_var_q(curve, 0.985, 200.0) == 0.0);
  }
  SUBCASE("saturation below the lowest breakpoint injects fully") {
    CHECK(volt_var_q(curve, 0.85, 150.0) == doctest::Approx(150.0));
  }
  SUBCASE("v = 1.05 absorbs half the available vars") {
    CHECK(volt_var_q(curve, 1.05, 200.0) == doctest::Approx(-100.0));
  }
  SUBCASE("continuity and monotonicity on a fine sweep") {
    double prev = volt_var_q(curve, 0.90, 1.0);
    for (double v = 0.90; v <= 1.10; v += 0.001) {
      const double q = volt_var_q(curve, v, 1.0);
      CHECK(q <= prev + 1e-12);
      CHECK(std::abs(q - prev) < 0.02);  // piecewise-linear continuity
      prev = q;
    }
  }
  SUBCASE("invalid curves are rejected") {
    VoltVarCurve bad;
    bad.breakpoints = {{1.0, 0.5}, {0.9, 1.0}};
    CHECK_THROWS_AS(bad.validate(), SchemaError);
    VoltVarCurve rising;
    rising.breakpoints = {{0.9, 0.0}, {1.0, 0.5}};
    CHECK_THROWS_AS(rising.validate(), SchemaError);
  }
}

TEST_CASE("pv reactive capability") {
  PvUnit pv;
  pv.s_kva = 110.0;
  CHECK(pv_q_capability_kvar(pv, 0.0) == doctest::Approx(110.0));
  CHECK(pv_q_capability_kvar(pv, 110.0) == doctest::Approx(0.0));
  CHECK(pv_q_capability_kvar(pv, 150.0) == doctest::Approx(0.0));  // clipped
  CHECK(pv_q_capability_kvar(pv, 100.0) ==
        doctest::Approx(std::sqrt(110.0 * 110.0 - 100.0 * 100.0)));
}

namespace {

StepInputs nominal_inputs(const FeederModel& m, double load_scale,
                          double pv_frac) {
  StepInputs in;
  for (const auto& ld : m.loads) {
    in.load_p_pu.push_back(ld.p_pu * load_scale);
    in.load_q_pu.push_back(ld.q_pu * load_scale);
  }
  for (const auto& pv : m.pv_units) {
    in.pv_p_kw.push_back(pv.dc_kw * pv_frac);
  }
  return in;
}

}  // namespace

TEST_CASE("avr step holds taps when the monitored voltage is in band") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  AvrOltcSettings st;
  st.v_ref = 1.0;
  st.bandwidth = 0.05;  // wide band: no movement expected at light load
  auto curve = VoltVarCurve::recommended_default();
  AvrState state;
  auto in = nominal_inputs(m, 0.1, 0.0);
  auto res = avr_step(m, st, curve, in, state);
  REQUIRE(res.op.converged);
  CHECK(res.tap_moves == 0);
  CHECK(res.taps == std::vector<int>{0, 0});
}

TEST_CASE("avr raises taps under heavy load with a high reference") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  AvrOltcSettings st;
  st.v_ref = 1.03;
  st.bandwidth = 0.0167;
  auto curve = VoltVarCurve::recommended_default();
  AvrState state;
  auto in = nominal_inputs(m, 1.0, 0.0);
  int total_moves = 0;
  for (int step = 0; step < 20; ++step) {
    auto res = avr_step(m, st, curve, in, state, step == 0 ? 32 : -1);
    REQUIRE(res.op.converged);
    total_moves += res.tap_moves;
  }
  CHECK(state.taps[0] > 0);
  CHECK(total_moves > 0);
  // settled: one more step moves nothing
  auto res = avr_step(m, st, curve, in, state);
  CHECK(res.tap_moves == 0);
}

TEST_CASE("avr inner fixed point is self-consistent") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  AvrOltcSettings st;
  auto curve = VoltVarCurve::recommended_default();
  AvrState state;
  auto in = nominal_inputs(m, 0.9, 0.4);
  auto res = avr_step(m, st, curve, in, state);
  REQUIRE(res.op.converged);
  // recompute q from realized voltages: change must stay within 0.1 kvar
  for (size_t u = 0; u < m.pv_units.size(); ++u) {
    const auto& pv = m.pv_units[u];
    const double v = std::abs(res.op.v[m.node_index(pv.bus, pv.phase)]);
    const double cap = pv_q_capability_kvar(pv, in.pv_p_kw[u]);
    CHECK(std::abs(volt_var_q(curve, v, cap) - res.q_kvar[u]) <= 0.1 + 1e-9);
  }
}

TEST_CASE("avr respects the per-step move cap") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  AvrOltcSettings st;
  st.v_ref = 1.05;  // far above: wants many boosts
  st.bandwidth = 0.01;
  auto curve = VoltVarCurve::recommended_default();
  AvrState state;
  auto in = nominal_inputs(m, 0.5, 0.0);
  auto res = avr_step(m, st, curve, in, state);
  REQUIRE(res.op.converged);
  // delta_to_max is 1 on both fixture devices
  CHECK(res.tap_moves <= 2);
  for (size_t p = 0; p < m.oltcs.size(); ++p) {
    CHECK(std::abs(res.taps[p] - 0) <= m.oltcs[p].delta_to_max);
  }
}

TEST_CASE("avr time delay postpones movement") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  AvrOltcSettings st;
  st.v_ref = 1.05;
  st.bandwidth = 0.01;
  st.delay_steps = 2;
  auto curve = VoltVarCurve::recommended_default();
  AvrState state;
  auto in = nominal_inputs(m, 0.5, 0.0);
  CHECK(avr_step(m, st, curve, in, state).tap_moves == 0);
  CHECK(avr_step(m, st, curve, in, state).tap_moves == 0);
  CHECK(avr_step(m, st, curve, in, state).tap_moves > 0);
}

TEST_CASE("ovr step with zero commands equals a plain power flow") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  auto in = nominal_inputs(m, 0.8, 0.3);
  auto res = ovr_step(m, {0, 0}, {0.0}, in);
  REQUIRE(res.op.converged);
  InjectionSpec inj = build_injections(m, in, {0.0});
  auto plain = solve_powerflow(m, TapRatioSet::from_taps(m, {0, 0}), inj);
  CHECK((res.op.v - plain.v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(res.q_clip_events == 0);
}

TEST_CASE("ovr clips commands beyond the momentary capability") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  auto in = nominal_inputs(m, 0.5, 1.0);  // full PV output: little headroom
  const auto& pv = m.pv_units[0];
  const double cap = pv_q_capability_kvar(pv, in.pv_p_kw[0]);
  auto res = ovr_step(m, {0, 0}, {cap + 50.0}, in);
  REQUIRE(res.op.converged);
  CHECK(res.q_clip_events == 1);
  CHECK(res.q_kvar[0] == doctest::Approx(cap));
  // realized apparent power within the rating (small tolerance)
  const double s =
      std::hypot(std::min(in.pv_p_kw[0], pv.s_kva), res.q_kvar[0]);
  CHECK(s <= 1.0001 * pv.s_kva);
}
