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

#ifndef GRIDVOLT_TESTS_FIXTURES_HPP
#define GRIDVOLT_TESTS_FIXTURES_HPP

#include <cmath>
#include <complex>
#include <string>

#include "gridvolt/netmodel.hpp"

namespace gvtest {

// Two buses, single phase, z_base = 1 ohm so impedances read as per-unit.
// Line z = 0.01 + 0.02j pu, load 100 kW + 50 kvar (0.1 + 0.05j pu).
inline std::string two_bus_json() {
  return R"({
  "buses": [
    {"id": "src", "phases": ["A"]},
    {"id": "load", "phases": ["A"]}
  ],
  "branches": [
    {"from": "src", "to": "load", "phases": ["A"],
     "series_z_ohm": [[[0.01, 0.02]]], "length_km": 1.0}
  ],
  "transformers": [],
  "loads": [
    {"bus": "load", "phase": "A", "model": "fixed_pq", "profile": "flat",
     "p_kw": 100.0, "q_kvar": 50.0}
  ],
  "pv": [],
  "source": {"bus": "src", "phases": [{"phase": "A", "mag_pu": 1.0, "angle_deg": 0.0}]},
  "bases": {"s_base_kva": 1000.0, "v_base_kv": {"default": 1.0}}
})";
}

// Source - OLTC - line - load chain, single phase. z_T = 0.01+0.05j pu.
inline std::string oltc_chain_json() {
  return R"({
  "buses": [
    {"id": "s", "phases": ["A"]},
    {"id": "m", "phases": ["A"]},
    {"id": "l", "phases": ["A"]}
  ],
  "branches": [
    {"from": "m", "to": "l", "phases": ["A"],
     "series_z_ohm": [[[0.02, 0.04]]], "length_km": 1.0}
  ],
  "transformers": [
    {"id": "reg", "primary_bus": "s", "secondary_bus": "m", "phases": ["A"],
     "z_t_pu": [0.01, 0.05], "tau_min": -16, "tau_max": 16, "a_max": 1.1,
     "ganged": true, "delta_to_max": 1}
  ],
  "loads": [
    {"bus": "l", "phase": "A", "model": "fixed_pq", "profile": "flat",
     "p_kw": 200.0, "q_kvar": 100.0}
  ],
  "pv": [],
  "source": {"bus": "s", "phases": [{"phase": "A", "mag_pu": 1.0, "angle_deg": 0.0}]},
  "bases": {"s_base_kva": 1000.0, "v_base_kv": {"default": 1.0}}
})";
}

// Two OLTCs in series with a PV unit at the tail; exercises superposition.
inline std::string two_oltc_json() {
  return R"({
  "buses": [
    {"id": "s", "phases": ["A"]},
    {"id": "b1", "phases": ["A"]},
    {"id": "b2", "phases": ["A"]},
    {"id": "b3", "phases": ["A"]},
    {"id": "b4", "phases": ["A"]}
  ],
  "branches": [
    {"from": "b1", "to": "b2", "phases": ["A"],
     "series_z_ohm": [[[0.02, 0.03]]], "length_km": 1.0},
    {"from": "b3", "to": "b4", "phases": ["A"],
     "series_z_ohm": [[[0.015, 0.025]]], "length_km": 1.0}
  ],
  "transformers": [
    {"id": "reg1", "primary_bus": "s", "secondary_bus": "b1", "phases": ["A"],
     "z_t_pu": [0.008, 0.04], "tau_min": -16, "tau_max": 16, "a_max": 1.1,
     "ganged": true, "delta_to_max": 1},
    {"id": "reg2", "primary_bus": "b2", "secondary_bus": "b3", "phases": ["A"],
     "z_t_pu": [0.01, 0.05], "tau_min": -16, "tau_max": 16, "a_max": 1.1,
     "ganged": true, "delta_to_max": 1}
  ],
  "loads": [
    {"bus": "b2", "phase": "A", "model": "fixed_pq", "profile": "flat",
     "p_kw": 150.0, "q_kvar": 60.0},
    {"bus": "b4", "phase": "A", "model": "fixed_pq", "profile": "flat",
     "p_kw": 120.0, "q_kvar": 50.0}
  ],
  "pv": [
    {"id": "pv1", "bus": "b4", "phase": "A", "dc_kw": 100.0, "s_kva": 110.0,
     "profile": "pvflat", "allow_curtailment": false}
  ],
  "source": {"bus": "s", "phases": [{"phase": "A", "mag_pu": 1.0, "angle_deg": 0.0}]},
  "bases": {"s_base_kva": 1000.0, "v_base_kv": {"default": 1.0}}
})";
}

// Three-phase, two-bus feeder with phase coupling and unbalanced loads.
inline std::string three_phase_json() {
  return R"({
  "buses": [
    {"id": "src", "phases": ["A", "B", "C"]},
    {"id": "ld", "phases": ["A", "B", "C"]}
  ],
  "branches": [
    {"from": "src", "to": "ld", "phases": ["A", "B", "C"],
     "series_z_ohm": [
       [[0.03, 0.06], [0.01, 0.02], [0.008, 0.016]],
       [[0.01, 0.02], [0.028, 0.058], [0.01, 0.02]],
       [[0.008, 0.016], [0.01, 0.02], [0.03, 0.06]]
     ],
     "length_km": 1.0}
  ],
  "transformers": [],
  "loads": [
    {"bus": "ld", "phase": "A", "model": "fixed_pq", "profile": "flat",
     "p_kw": 300.0, "q_kvar": 120.0},
    {"bus": "ld", "phase": "B", "model": "fixed_pq", "profile": "flat",
     "p_kw": 150.0, "q_kvar": 40.0},
    {"bus": "ld", "phase": "C", "model": "fixed_pq", "profile": "flat",
     "p_kw": 80.0, "q_kvar": 20.0}
  ],
  "pv": [],
  "source": {"bus": "src", "phases": [
    {"phase": "A", "mag_pu": 1.0, "angle_deg": 0.0},
    {"phase": "B", "mag_pu": 1.0, "angle_deg": -120.0},
    {"phase": "C", "mag_pu": 1.0, "angle_deg": 120.0}
  ]},
  "bases": {"s_base_kva": 1000.0, "v_base_kv": {"default": 1.0}}
})";
}

/// Closed-form load-bus voltage magnitude for a 2-bus feeder:
/// |V|^4 + |V|^2 (2(PR+QX) - |Vs|^2) + (P^2+Q^2)(R^2+X^2) = 0,
/// with P,Q consumed and Vs the source magnitude. Returns the high root.
inline double two_bus_vmag_oracle(double vs, double r, double x, double p,
                                  double q) {
  const double b = 2.0 * (p * r + q * x) - vs * vs;
  const double c = (p * p + q * q) * (r * r + x * x);
  const double disc = b * b - 4.0 * c;
  const double u = (-b + std::sqrt(disc)) / 2.0;
  return std::sqrt(u);
}

}  // namespace gvtest

#endif  // GRIDVOLT_TESTS_FIXTURES_HPP
