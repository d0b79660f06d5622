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

#include "gridvolt/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace gv {

using nlohmann::json;

char phase_letter(Phase p) { return "ABC"[static_cast<int>(p)]; }

Phase phase_from_letter(char c) {
  switch (c) {
    case 'A': case 'a': return Phase::A;
    case 'B': case 'b': return Phase::B;
    case 'C': case 'c': return Phase::C;
  }
  throw SchemaError(std::string("invalid phase '") + c + "'");
}

namespace {

const json& require(const json& j, const char* key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError("missing field '" + ctx + "." + key + "'");
  }
  return *it;
}

double as_number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw SchemaError("field '" + ctx + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) {
    throw SchemaError("field '" + ctx + "' must be an integer");
  }
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) throw SchemaError("field '" + ctx + "' must be a string");
  return j.get<std::string>();
}

cdouble as_complex(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) {
    throw SchemaError("field '" + ctx + "' must be a [re, im] pair");
  }
  return {as_number(j[0], ctx + "[0]"), as_number(j[1], ctx + "[1]")};
}

std::vector<Phase> parse_phases(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError("field '" + ctx + "' must be a non-empty phase list");
  }
  std::vector<Phase> out;
  for (const auto& p : j) {
    std::string s = as_string(p, ctx);
    if (s.size() != 1) throw SchemaError("field '" + ctx + "': bad phase '" + s + "'");
    out.push_back(phase_from_letter(s[0]));
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw SchemaError("field '" + ctx + "': duplicate phase");
  }
  return out;
}

std::vector<std::vector<cdouble>> parse_cmatrix(const json& j, size_t dim,
                                                const std::string& ctx) {
  if (!j.is_array() || j.size() != dim) {
    throw SchemaError("field '" + ctx + "' must be a " + std::to_string(dim) +
                      "x" + std::to_string(dim) + " complex matrix");
  }
  std::vector<std::vector<cdouble>> m(dim);
  for (size_t r = 0; r < dim; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != dim) {
      throw SchemaError("field '" + ctx + "[" + std::to_string(r) +
                        "]' has wrong dimension");
    }
    for (size_t c = 0; c < dim; ++c) {
      m[r].push_back(as_complex(row[c], ctx + "[" + std::to_string(r) + "][" +
                                            std::to_string(c) + "]"));
    }
  }
  return m;
}

json complex_to_json(cdouble z) { return json::array({z.real(), z.imag()}); }

json cmatrix_to_json(const std::vector<std::vector<cdouble>>& m) {
  json rows = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (cdouble z : r) row.push_back(complex_to_json(z));
    rows.push_back(row);
  }
  return rows;
}

json phases_to_json(const std::vector<Phase>& ps) {
  json a = json::array();
  for (Phase p : ps) a.push_back(std::string(1, phase_letter(p)));
  return a;
}

// Union-find over bus ids for the connectivity check.
struct UnionFind {
  std::map<std::string, std::string> parent;
  void add(const std::string& x) {
    if (!parent.count(x)) parent[x] = x;
  }
  std::string find(const std::string& x) {
    std::string r = x;
    while (parent[r] != r) r = parent[r];
    return r;
  }
  void unite(const std::string& a, const std::string& b) {
    parent[find(a)] = find(b);
  }
};

}  // namespace

void TimeSeriesProfile::validate() const {
  if (timestamps.size() != values.size()) {
    throw SchemaError("profile '" + id + "': timestamp/value count mismatch");
  }
  if (timestamps.size() < 2) return;
  const double dt = timestamps[1] - timestamps[0];
  if (dt <= 0) throw SchemaError("profile '" + id + "': timestamps not increasing");
  for (size_t i = 1; i < timestamps.size(); ++i) {
    double step = timestamps[i] - timestamps[i - 1];
    if (step <= 0 || std::abs(step - dt) > 1e-6 * dt) {
      throw SchemaError("profile '" + id + "': non-uniform spacing at row " +
                        std::to_string(i));
    }
  }
}

void FeederModel::finalize() {
  nodes_.clear();
  index_.clear();
  slack_mask_.clear();
  slack_indices_.clear();

  if (buses.empty()) throw SchemaError("field 'buses' is empty");
  if (bases.s_base_kva <= 0) throw SchemaError("field 'bases.s_base_kva' must be > 0");
  if (bases.default_v_base_kv <= 0) {
    throw SchemaError("field 'bases.v_base_kv.default' must be > 0");
  }

  std::map<std::string, const Bus*> bus_by_id;
  for (const auto& b : buses) {
    if (bus_by_id.count(b.id)) throw SchemaError("duplicate bus id '" + b.id + "'");
    if (b.phases.empty()) throw SchemaError("bus '" + b.id + "' has no phases");
    bus_by_id[b.id] = &b;
    for (Phase p : b.phases) {
      NodeRef n{b.id, p, static_cast<int>(nodes_.size())};
      auto key = std::make_pair(b.id, static_cast<int>(p));
      if (index_.count(key)) {
        throw SchemaError("duplicate node " + n.name());
      }
      index_[key] = n.index;
      nodes_.push_back(std::move(n));
    }
  }

  auto check_bus = [&](const std::string& id, const std::string& ctx) {
    if (!bus_by_id.count(id)) {
      throw SchemaError("field '" + ctx + "' references unknown bus '" + id + "'");
    }
  };

  UnionFind uf;
  for (const auto& b : buses) uf.add(b.id);

  for (size_t i = 0; i < branches.size(); ++i) {
    const auto& br = branches[i];
    const std::string ctx = "branches[" + std::to_string(i) + "]";
    check_bus(br.from_bus, ctx + ".from");
    check_bus(br.to_bus, ctx + ".to");
    const size_t dim = br.phases.size();
    if (br.series_z_ohm.size() != dim) {
      throw SchemaError("field '" + ctx + ".series_z_ohm' dimension mismatch");
    }
    for (size_t r = 0; r < dim; ++r) {
      if (br.series_z_ohm[r].size() != dim) {
        throw SchemaError("field '" + ctx + ".series_z_ohm' dimension mismatch");
      }
      for (size_t c = r + 1; c < dim; ++c) {
        cdouble d = br.series_z_ohm[r][c] - br.series_z_ohm[c][r];
        if (std::abs(d) > 1e-12 * (1.0 + std::abs(br.series_z_ohm[r][c]))) {
          throw SchemaError("field '" + ctx + ".series_z_ohm' is not symmetric");
        }
      }
    }
    if (!br.shunt_y_siemens.empty() && br.shunt_y_siemens.size() != dim) {
      throw SchemaError("field '" + ctx + ".shunt_y_s' dimension mismatch");
    }
    for (Phase p : br.phases) {
      if (try_node_index(br.from_bus, p) < 0 || try_node_index(br.to_bus, p) < 0) {
        throw SchemaError("field '" + ctx + "': phase " +
                          std::string(1, phase_letter(p)) +
                          " missing on an endpoint bus");
      }
    }
    uf.unite(br.from_bus, br.to_bus);
  }

  for (const auto& t : oltcs) {
    const std::string ctx = "transformers['" + t.id + "']";
    check_bus(t.primary_bus, ctx + ".primary_bus");
    check_bus(t.secondary_bus, ctx + ".secondary_bus");
    if (!(t.tau_min <= 0 && 0 <= t.tau_max) || t.tau_max == 0) {
      throw SchemaError("field '" + ctx + "': require tau_min <= 0 < tau_max");
    }
    if (!(t.a_max > 1.0)) throw SchemaError("field '" + ctx + ".a_max' must be > 1");
    if (t.z_t_pu == cdouble(0, 0)) {
      throw SchemaError("field '" + ctx + ".z_t_pu' must be nonzero");
    }
    if (t.delta_to_max < 0) {
      throw SchemaError("field '" + ctx + ".delta_to_max' must be >= 0");
    }
    for (Phase p : t.phases) {
      if (try_node_index(t.primary_bus, p) < 0 ||
          try_node_index(t.secondary_bus, p) < 0) {
        throw SchemaError("field '" + ctx + "': regulated phase " +
                          std::string(1, phase_letter(p)) + " missing on a bus");
      }
    }
    uf.unite(t.primary_bus, t.secondary_bus);
  }

  for (size_t i = 0; i < loads.size(); ++i) {
    auto& ld = loads[i];
    const std::string ctx = "loads[" + std::to_string(i) + "]";
    check_bus(ld.bus, ctx + ".bus");
    if (try_node_index(ld.bus, ld.phase) < 0) {
      throw SchemaError("field '" + ctx + "': node " + ld.bus + "." +
                        phase_letter(ld.phase) + " does not exist");
    }
    ld.p_pu = ld.base_p_kw / bases.s_base_kva;
    ld.q_pu = ld.base_q_kvar / bases.s_base_kva;
  }

  for (const auto& pv : pv_units) {
    const std::string ctx = "pv['" + pv.id + "']";
    check_bus(pv.bus, ctx + ".bus");
    if (try_node_index(pv.bus, pv.phase) < 0) {
      throw SchemaError("field '" + ctx + "': node " + pv.bus + "." +
                        phase_letter(pv.phase) + " does not exist");
    }
    if (pv.s_kva < 0) throw SchemaError("field '" + ctx + ".s_kva' must be >= 0");
    if (pv.allow_curtailment) {
      throw SchemaError("field '" + ctx + ".allow_curtailment' must be false");
    }
  }

  check_bus(source.bus, "source.bus");
  if (source.phases.empty()) throw SchemaError("field 'source.phases' is empty");
  for (const auto& sp : source.phases) {
    if (try_node_index(source.bus, sp.phase) < 0) {
      throw SchemaError("field 'source.phases': phase " +
                        std::string(1, phase_letter(sp.phase)) +
                        " missing on bus '" + source.bus + "'");
    }
    if (sp.mag_pu <= 0) throw SchemaError("field 'source.phases.mag_pu' must be > 0");
  }

  // Connectivity: every bus reachable from the slack.
  const std::string root = uf.find(source.bus);
  for (const auto& b : buses) {
    if (uf.find(b.id) != root) {
      throw SchemaError("disconnected graph: bus '" + b.id +
                        "' unreachable from source");
    }
  }

  slack_mask_.assign(nodes_.size(), false);
  for (const auto& sp : source.phases) {
    int idx = node_index(source.bus, sp.phase);
    slack_mask_[idx] = true;
    slack_indices_.push_back(idx);
  }
  std::sort(slack_indices_.begin(), slack_indices_.end());
}

int FeederModel::node_index(const std::string& bus, Phase ph) const {
  int idx = try_node_index(bus, ph);
  if (idx < 0) {
    throw SchemaError("unknown node " + bus + "." + phase_letter(ph));
  }
  return idx;
}

int FeederModel::try_node_index(const std::string& bus, Phase ph) const {
  auto it = index_.find(std::make_pair(bus, static_cast<int>(ph)));
  return it == index_.end() ? -1 : it->second;
}

double FeederModel::z_base_ohm(const std::string& bus) const {
  const double v = bases.v_base_kv(bus) * 1000.0;
  return v * v / (bases.s_base_kva * 1000.0);
}

std::vector<NodeRef> node_ordering(const FeederModel& model) {
  return model.nodes();
}

FeederModel parse_feeder(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("feeder JSON parse error: ") + e.what());
  }

  FeederModel m;

  for (const auto& jb : require(j, "buses", "")) {
    Bus b;
    b.id = as_string(require(jb, "id", "buses[]"), "buses[].id");
    b.phases = parse_phases(require(jb, "phases", "buses[]"), "buses[].phases");
    m.buses.push_back(std::move(b));
  }

  size_t bi = 0;
  for (const auto& jb : require(j, "branches", "")) {
    const std::string ctx = "branches[" + std::to_string(bi++) + "]";
    Branch br;
    br.from_bus = as_string(require(jb, "from", ctx), ctx + ".from");
    br.to_bus = as_string(require(jb, "to", ctx), ctx + ".to");
    br.phases = parse_phases(require(jb, "phases", ctx), ctx + ".phases");
    br.series_z_ohm = parse_cmatrix(require(jb, "series_z_ohm", ctx),
                                    br.phases.size(), ctx + ".series_z_ohm");
    if (jb.contains("shunt_y_s") && !jb["shunt_y_s"].is_null()) {
      br.shunt_y_siemens =
          parse_cmatrix(jb["shunt_y_s"], br.phases.size(), ctx + ".shunt_y_s");
    }
    if (jb.contains("length_km")) {
      br.length_km = as_number(jb["length_km"], ctx + ".length_km");
    }
    m.branches.push_back(std::move(br));
  }

  for (const auto& jt : require(j, "transformers", "")) {
    OltcDevice t;
    t.id = as_string(require(jt, "id", "transformers[]"), "transformers[].id");
    const std::string ctx = "transformers['" + t.id + "']";
    t.primary_bus = as_string(require(jt, "primary_bus", ctx), ctx + ".primary_bus");
    t.secondary_bus =
        as_string(require(jt, "secondary_bus", ctx), ctx + ".secondary_bus");
    t.phases = parse_phases(require(jt, "phases", ctx), ctx + ".phases");
    t.z_t_pu = as_complex(require(jt, "z_t_pu", ctx), ctx + ".z_t_pu");
    if (jt.contains("tau_min")) t.tau_min = as_int(jt["tau_min"], ctx + ".tau_min");
    if (jt.contains("tau_max")) t.tau_max = as_int(jt["tau_max"], ctx + ".tau_max");
    if (jt.contains("a_max")) t.a_max = as_number(jt["a_max"], ctx + ".a_max");
    if (jt.contains("ganged")) t.ganged = jt["ganged"].get<bool>();
    if (jt.contains("delta_to_max")) {
      t.delta_to_max = as_int(jt["delta_to_max"], ctx + ".delta_to_max");
    }
    m.oltcs.push_back(std::move(t));
  }

  size_t li = 0;
  for (const auto& jl : require(j, "loads", "")) {
    const std::string ctx = "loads[" + std::to_string(li++) + "]";
    LoadSpec ld;
    ld.bus = as_string(require(jl, "bus", ctx), ctx + ".bus");
    std::string ph = as_string(require(jl, "phase", ctx), ctx + ".phase");
    if (ph.size() != 1) throw SchemaError("field '" + ctx + ".phase' invalid");
    ld.phase = phase_from_letter(ph[0]);
    if (jl.contains("model")) {
      std::string model = as_string(jl["model"], ctx + ".model");
      if (model != "fixed_pq") {
        throw SchemaError("field '" + ctx + ".model': only 'fixed_pq' supported");
      }
    }
    ld.profile_id = as_string(require(jl, "profile", ctx), ctx + ".profile");
    ld.base_p_kw = as_number(require(jl, "p_kw", ctx), ctx + ".p_kw");
    ld.base_q_kvar = as_number(require(jl, "q_kvar", ctx), ctx + ".q_kvar");
    m.loads.push_back(std::move(ld));
  }

  for (const auto& jp : require(j, "pv", "")) {
    PvUnit pv;
    pv.id = as_string(require(jp, "id", "pv[]"), "pv[].id");
    const std::string ctx = "pv['" + pv.id + "']";
    pv.bus = as_string(require(jp, "bus", ctx), ctx + ".bus");
    std::string ph = as_string(require(jp, "phase", ctx), ctx + ".phase");
    if (ph.size() != 1) throw SchemaError("field '" + ctx + ".phase' invalid");
    pv.phase = phase_from_letter(ph[0]);
    pv.dc_kw = as_number(require(jp, "dc_kw", ctx), ctx + ".dc_kw");
    pv.s_kva = as_number(require(jp, "s_kva", ctx), ctx + ".s_kva");
    pv.profile_id = as_string(require(jp, "profile", ctx), ctx + ".profile");
    if (jp.contains("allow_curtailment")) {
      pv.allow_curtailment = jp["allow_curtailment"].get<bool>();
    }
    m.pv_units.push_back(std::move(pv));
  }

  const auto& js = require(j, "source", "");
  m.source.bus = as_string(require(js, "bus", "source"), "source.bus");
  for (const auto& jp : require(js, "phases", "source")) {
    SourcePhase sp;
    std::string ph = as_string(require(jp, "phase", "source.phases"),
                               "source.phases.phase");
    if (ph.size() != 1) throw SchemaError("field 'source.phases.phase' invalid");
    sp.phase = phase_from_letter(ph[0]);
    sp.mag_pu = as_number(require(jp, "mag_pu", "source.phases"),
                          "source.phases.mag_pu");
    if (jp.contains("angle_deg")) {
      sp.angle_deg = as_number(jp["angle_deg"], "source.phases.angle_deg");
    }
    m.source.phases.push_back(sp);
  }

  const auto& jbase = require(j, "bases", "");
  m.bases.s_base_kva =
      as_number(require(jbase, "s_base_kva", "bases"), "bases.s_base_kva");
  const auto& jv = require(jbase, "v_base_kv", "bases");
  m.bases.default_v_base_kv =
      as_number(require(jv, "default", "bases.v_base_kv"), "bases.v_base_kv.default");
  if (jv.contains("override")) {
    for (auto it = jv["override"].begin(); it != jv["override"].end(); ++it) {
      m.bases.v_base_kv_override[it.key()] =
          as_number(it.value(), "bases.v_base_kv.override." + it.key());
    }
  }

  m.finalize();
  return m;
}

FeederModel load_feeder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feeder file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_feeder(ss.str());
}

std::string serialize_feeder(const FeederModel& m) {
  json j;
  j["buses"] = json::array();
  for (const auto& b : m.buses) {
    j["buses"].push_back({{"id", b.id}, {"phases", phases_to_json(b.phases)}});
  }
  j["branches"] = json::array();
  for (const auto& br : m.branches) {
    json jb{{"from", br.from_bus},
            {"to", br.to_bus},
            {"phases", phases_to_json(br.phases)},
            {"series_z_ohm", cmatrix_to_json(br.series_z_ohm)},
            {"length_km", br.length_km}};
    if (!br.shunt_y_siemens.empty()) {
      jb["shunt_y_s"] = cmatrix_to_json(br.shunt_y_siemens);
    }
    j["branches"].push_back(std::move(jb));
  }
  j["transformers"] = json::array();
  for (const auto& t : m.oltcs) {
    j["transformers"].push_back({{"id", t.id},
                                 {"primary_bus", t.primary_bus},
                                 {"secondary_bus", t.secondary_bus},
                                 {"phases", phases_to_json(t.phases)},
                                 {"z_t_pu", complex_to_json(t.z_t_pu)},
                                 {"tau_min", t.tau_min},
                                 {"tau_max", t.tau_max},
                                 {"a_max", t.a_max},
                                 {"ganged", t.ganged},
                                 {"delta_to_max", t.delta_to_max}});
  }
  j["loads"] = json::array();
  for (const auto& ld : m.loads) {
    j["loads"].push_back({{"bus", ld.bus},
                          {"phase", std::string(1, phase_letter(ld.phase))},
                          {"model", "fixed_pq"},
                          {"profile", ld.profile_id},
                          {"p_kw", ld.base_p_kw},
                          {"q_kvar", ld.base_q_kvar}});
  }
  j["pv"] = json::array();
  for (const auto& pv : m.pv_units) {
    j["pv"].push_back({{"id", pv.id},
                       {"bus", pv.bus},
                       {"phase", std::string(1, phase_letter(pv.phase))},
                       {"dc_kw", pv.dc_kw},
                       {"s_kva", pv.s_kva},
                       {"profile", pv.profile_id},
                       {"allow_curtailment", pv.allow_curtailment}});
  }
  json jsp = json::array();
  for (const auto& sp : m.source.phases) {
    jsp.push_back({{"phase", std::string(1, phase_letter(sp.phase))},
                   {"mag_pu", sp.mag_pu},
                   {"angle_deg", sp.angle_deg}});
  }
  j["source"] = {{"bus", m.source.bus}, {"phases", jsp}};
  json jov = json::object();
  for (const auto& [k, v] : m.bases.v_base_kv_override) jov[k] = v;
  j["bases"] = {{"s_base_kva", m.bases.s_base_kva},
                {"v_base_kv", {{"default", m.bases.default_v_base_kv},
                               {"override", jov}}}};
  return j.dump(2);
}

TimeSeriesProfile load_profile(const std::string& path, const std::string& id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open profile file '" + path + "'");
  TimeSeriesProfile p;
  p.id = id;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("profile '" + path + "' is empty");
  if (line != "timestamp,value") {
    throw SchemaError("profile '" + path + "': expected header 'timestamp,value'");
  }
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw SchemaError("profile '" + path + "': malformed row " + std::to_string(row));
    }
    try {
      p.timestamps.push_back(std::stod(line.substr(0, comma)));
      p.values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw SchemaError("profile '" + path + "': bad number at row " +
                        std::to_string(row));
    }
  }
  p.validate();
  return p;
}

void save_profile(const TimeSeriesProfile& profile, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write profile file '" + path + "'");
  out << "timestamp,value\n";
  char buf[96];
  for (size_t i = 0; i < profile.timestamps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", profile.timestamps[i],
                  profile.values[i]);
    out << buf;
  }
}

}  // namespace gv
