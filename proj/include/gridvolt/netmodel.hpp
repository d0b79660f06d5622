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

#ifndef GRIDVOLT_NETMODEL_HPP
#define GRIDVOLT_NETMODEL_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridvolt/common.hpp"

namespace gv {

enum class Phase : int { A = 0, B = 1, C = 2 };

char phase_letter(Phase p);
Phase phase_from_letter(char c);

/// One electrical node: a (bus, phase) pair with its position in the global
/// node ordering. Ordering is bus declaration order, phases A<B<C within a
/// bus; indices are dense 0..N-1.
struct NodeRef {
  std::string bus_id;
  Phase phase = Phase::A;
  int index = -1;

  bool operator==(const NodeRef& o) const {
    return bus_id == o.bus_id && phase == o.phase && index == o.index;
  }
  std::string name() const { return bus_id + "." + phase_letter(phase); }
};

struct Bus {
  std::string id;
  std::vector<Phase> phases;  // sorted A<B<C
};

/// Series element between two buses. Impedance/shunt matrices are dense over
/// the branch's phase subset, ordered as `phases`. Totals, not per-length.
struct Branch {
  std::string from_bus;
  std::string to_bus;
  std::vector<Phase> phases;
  std::vector<std::vector<cdouble>> series_z_ohm;   // |ph| x |ph|, symmetric
  std::vector<std::vector<cdouble>> shunt_y_siemens;  // |ph| x |ph|, may be zero
  double length_km = 0.0;
};

/// On-load tap changer: ideal ratio `a` in series with winding impedance z_T
/// on the primary side, one two-node stamp per regulated phase. A single
/// integer tap drives all phases when ganged.
struct OltcDevice {
  std::string id;
  std::string primary_bus;
  std::string secondary_bus;
  std::vector<Phase> phases;
  cdouble z_t_pu;        // winding impedance, per-unit, nonzero
  int tau_min = -16;
  int tau_max = 16;
  double a_max = 1.1;
  bool ganged = true;
  int delta_to_max = 1;  // max |tap change| per simulation step

  /// Tap ratio for an integer tap position: a = 1 + (tau/tau_max)(a_max - 1).
  double ratio_for_tap(int tau) const {
    return 1.0 + (static_cast<double>(tau) / tau_max) * (a_max - 1.0);
  }
};

/// Constant-PQ load at a single node. Profile values multiply base P and Q.
struct LoadSpec {
  std::string bus;
  Phase phase = Phase::A;
  std::string profile_id;
  double base_p_kw = 0.0;
  double base_q_kvar = 0.0;
  double p_pu = 0.0;  // base_p_kw / s_base_kva
  double q_pu = 0.0;
};

/// PV generator with smart inverter. Profile values are absolute kW of real
/// power. Reactive capability at output P is sqrt(S^2 - P^2); P above S is
/// clipped with a warning. Curtailment is never allowed.
struct PvUnit {
  std::string id;
  std::string bus;
  Phase phase = Phase::A;
  double dc_kw = 0.0;
  double s_kva = 0.0;  // inverter apparent-power rating
  std::string profile_id;
  bool allow_curtailment = false;
};

struct SourcePhase {
  Phase phase = Phase::A;
  double mag_pu = 1.0;
  double angle_deg = 0.0;
};

/// Slack specification: one bus, fixed per-phase voltage.
struct SourceSpec {
  std::string bus;
  std::vector<SourcePhase> phases;
};

/// Per-unit bases. v_base_kv is phase-to-ground kV; per-bus overrides fall
/// back to the default. s_base_kva is the per-node power base.
struct Bases {
  double s_base_kva = 1000.0;
  double default_v_base_kv = 0.0;
  std::map<std::string, double> v_base_kv_override;

  double v_base_kv(const std::string& bus) const {
    auto it = v_base_kv_override.find(bus);
    return it == v_base_kv_override.end() ? default_v_base_kv : it->second;
  }
};

/// Uniformly sampled time series. Values are kW for PV profiles and
/// dimensionless multipliers for load profiles.
struct TimeSeriesProfile {
  std::string id;
  std::vector<double> timestamps;  // seconds, uniform spacing
  std::vector<double> values;

  double dt_s() const {
    return timestamps.size() > 1 ? timestamps[1] - timestamps[0] : 0.0;
  }
  void validate() const;
};

/// Immutable multi-phase feeder description. Safe to share read-only across
/// threads after construction.
class FeederModel {
 public:
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<OltcDevice> oltcs;
  std::vector<LoadSpec> loads;
  std::vector<PvUnit> pv_units;
  SourceSpec source;
  Bases bases;

  /// Builds the node ordering and checks all model invariants.
  /// Throws SchemaError naming the offending field on violation.
  void finalize();

  const std::vector<NodeRef>& nodes() const { return nodes_; }
  int n_nodes() const { return static_cast<int>(nodes_.size()); }

  int node_index(const std::string& bus, Phase ph) const;
  int try_node_index(const std::string& bus, Phase ph) const;  // -1 if absent

  bool is_slack_node(int index) const { return slack_mask_[index]; }
  const std::vector<int>& slack_indices() const { return slack_indices_; }

  double s_base_kva() const { return bases.s_base_kva; }
  double to_pu_power(double kw) const { return kw / bases.s_base_kva; }
  double from_pu_power(double pu) const { return pu * bases.s_base_kva; }
  /// Impedance base in ohms at a bus: (1000 * v_base_kv)^2 / (1000 * s_base_kva).
  double z_base_ohm(const std::string& bus) const;

 private:
  std::vector<NodeRef> nodes_;
  std::map<std::pair<std::string, int>, int> index_;
  std::vector<bool> slack_mask_;
  std::vector<int> slack_indices_;
};

/// Loads and validates a feeder description file (JSON schema documented in
/// data/FORMAT.md). Throws SchemaError / IoError.
FeederModel load_feeder(const std::string& path);

/// Parses a feeder from JSON text. Same validation as load_feeder.
FeederModel parse_feeder(const std::string& json_text);

/// Serializes a feeder back to schema JSON. Round-trips field-by-field.
std::string serialize_feeder(const FeederModel& model);

/// Deterministic global node ordering: bus declaration order, phase A<B<C.
std::vector<NodeRef> node_ordering(const FeederModel& model);

/// Reads a profile CSV (`timestamp,value` header, LF endings).
TimeSeriesProfile load_profile(const std::string& path, const std::string& id);

/// Writes a profile CSV in the same format load_profile reads.
void save_profile(const TimeSeriesProfile& profile, const std::string& path);

}  // namespace gv

#endif  // GRIDVOLT_NETMODEL_HPP
