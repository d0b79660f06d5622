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

#include <cstdio>
#include <fstream>

#include "gridvolt/netmodel.hpp"
#include "support/fixtures.hpp"

using namespace gv;

TEST_CASE("minimal 2-bus feeder parses with N=2") {
  FeederModel m = parse_feeder(gvtest::two_bus_json());
  CHECK(m.n_nodes() == 2);
  CHECK(m.nodes()[0].bus_id == "src");
  CHECK(m.nodes()[0].phase == Phase::A);
  CHECK(m.is_slack_node(0));
  CHECK_FALSE(m.is_slack_node(1));
  CHECK(m.loads.size() == 1);
  CHECK(m.loads[0].p_pu == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("node ordering groups phases per bus, A<B<C") {
  FeederModel m = parse_feeder(gvtest::three_phase_json());
  auto nodes = node_ordering(m);
  REQUIRE(nodes.size() == 6);
  for (int i = 0; i < 6; ++i) CHECK(nodes[i].index == i);
  CHECK(nodes[0].name() == "src.A");
  CHECK(nodes[1].name() == "src.B");
  CHECK(nodes[2].name() == "src.C");
  CHECK(nodes[3].name() == "ld.A");
}

TEST_CASE("re-parsing the same text yields the identical ordering") {
  FeederModel a = parse_feeder(gvtest::two_oltc_json());
  FeederModel b = parse_feeder(gvtest::two_oltc_json());
  REQUIRE(a.n_nodes() == b.n_nodes());
  for (int i = 0; i < a.n_nodes(); ++i) {
    CHECK(a.nodes()[i] == b.nodes()[i]);
  }
}

TEST_CASE("serialize round-trips field-by-field") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  FeederModel m2 = parse_feeder(serialize_feeder(m));
  CHECK(m2.buses.size() == m.buses.size());
  REQUIRE(m2.branches.size() == m.branches.size());
  for (size_t i = 0; i < m.branches.size(); ++i) {
    CHECK(m2.branches[i].from_bus == m.branches[i].from_bus);
    CHECK(m2.branches[i].series_z_ohm == m.branches[i].series_z_ohm);
    CHECK(m2.branches[i].length_km == m.branches[i].length_km);
  }
  REQUIRE(m2.oltcs.size() == m.oltcs.size());
  for (size_t i = 0; i < m.oltcs.size(); ++i) {
    CHECK(m2.oltcs[i].z_t_pu == m.oltcs[i].z_t_pu);
    CHECK(m2.oltcs[i].tau_min == m.oltcs[i].tau_min);
    CHECK(m2.oltcs[i].a_max == m.oltcs[i].a_max);
  }
  REQUIRE(m2.loads.size() == m.loads.size());
  for (size_t i = 0; i < m.loads.size(); ++i) {
    CHECK(m2.loads[i].base_p_kw == m.loads[i].base_p_kw);
    CHECK(m2.loads[i].p_pu == m.loads[i].p_pu);
  }
  REQUIRE(m2.pv_units.size() == m.pv_units.size());
  CHECK(m2.pv_units[0].s_kva == m.pv_units[0].s_kva);
  CHECK(m2.bases.s_base_kva == m.bases.s_base_kva);
}

TEST_CASE("schema violations name the offending field") {
  SUBCASE("tau_max = 0") {
    std::string txt = gvtest::oltc_chain_json();
    auto pos = txt.find("\"tau_max\": 16");
    txt.replace(pos, 13, "\"tau_max\": 0");
    CHECK_THROWS_WITH_AS(parse_feeder(txt),
                         doctest::Contains("tau_min <= 0 < tau_max"),
                         SchemaError);
  }
  SUBCASE("missing buses key") {
    CHECK_THROWS_WITH_AS(parse_feeder("{}"), doctest::Contains("buses"),
                         SchemaError);
  }
  SUBCASE("duplicate bus id") {
    std::string txt = gvtest::two_bus_json();
    auto pos = txt.find("\"id\": \"load\"");
    txt.replace(pos, 12, "\"id\": \"src\"");
    CHECK_THROWS_WITH_AS(parse_feeder(txt), doctest::Contains("duplicate bus"),
                         SchemaError);
  }
  SUBCASE("disconnected graph") {
    std::string txt = R"({
      "buses": [{"id": "a", "phases": ["A"]}, {"id": "b", "phases": ["A"]}],
      "branches": [], "transformers": [], "loads": [], "pv": [],
      "source": {"bus": "a", "phases": [{"phase": "A", "mag_pu": 1.0}]},
      "bases": {"s_base_kva": 1000.0, "v_base_kv": {"default": 1.0}}
    })";
    CHECK_THROWS_WITH_AS(parse_feeder(txt), doctest::Contains("disconnected"),
                         SchemaError);
  }
  SUBCASE("asymmetric impedance matrix") {
    std::string txt = gvtest::three_phase_json();
    auto pos = txt.find("[[0.03, 0.06], [0.01, 0.02], [0.008, 0.016]]");
    txt.replace(pos, 44, "[[0.03, 0.06], [0.02, 0.02], [0.008, 0.016]]");
    CHECK_THROWS_WITH_AS(parse_feeder(txt), doctest::Contains("symmetric"),
                         SchemaError);
  }
}

TEST_CASE("per-unit conversion round trip is exact") {
  FeederModel m = parse_feeder(gvtest::three_phase_json());
  for (const auto& ld : m.loads) {
    CHECK(ld.p_pu * m.bases.s_base_kva == ld.base_p_kw);
    CHECK(m.from_pu_power(m.to_pu_power(ld.base_p_kw)) ==
          doctest::Approx(ld.base_p_kw).epsilon(1e-13));
  }
}

TEST_CASE("every load and pv node exists in the node list") {
  FeederModel m = parse_feeder(gvtest::two_oltc_json());
  for (const auto& ld : m.loads) {
    CHECK(m.try_node_index(ld.bus, ld.phase) >= 0);
  }
  for (const auto& pv : m.pv_units) {
    CHECK(m.try_node_index(pv.bus, pv.phase) >= 0);
  }
}

TEST_CASE("profile csv round trip and validation") {
  TimeSeriesProfile p;
  p.id = "t";
  for (int i = 0; i < 10; ++i) {
    p.timestamps.push_back(30.0 * i);
    p.values.push_back(0.5 + 0.01 * i);
  }
  const std::string path = "/tmp/gv_test_profile.csv";
  save_profile(p, path);
  TimeSeriesProfile q = load_profile(path, "t");
  CHECK(q.values == p.values);
  CHECK(q.dt_s() == 30.0);
  std::remove(path.c_str());

  SUBCASE("non-uniform spacing rejected") {
    TimeSeriesProfile bad = p;
    bad.timestamps.back() += 5.0;
    CHECK_THROWS_AS(bad.validate(), SchemaError);
  }
}
