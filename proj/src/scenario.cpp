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

#include "gridvolt/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gv {

using nlohmann::json;

Scenario parse_scenario(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("scenario JSON parse error: ") + e.what());
  }

  Scenario s;
  auto path_of = [&](const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return p.string();
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
  };

  if (!j.contains("feeder")) throw SchemaError("missing field 'feeder'");
  s.feeder_path = path_of(j["feeder"].get<std::string>());
  if (!j.contains("profiles_dir")) {
    throw SchemaError("missing field 'profiles_dir'");
  }
  s.profiles_dir = path_of(j["profiles_dir"].get<std::string>());

  if (j.contains("method")) {
    const std::string m = j["method"].get<std::string>();
    if (m == "avr") s.method = Method::kAvr;
    else if (m == "ovr") s.method = Method::kOvr;
    else throw SchemaError("field 'method' must be 'avr' or 'ovr'");
  }
  if (j.contains("steps")) s.steps = j["steps"].get<int>();
  if (j.contains("dt_s")) s.dt_s = j["dt_s"].get<double>();
  if (s.dt_s <= 0) throw SchemaError("field 'dt_s' must be > 0");
  if (j.contains("horizon_steps")) s.horizon_steps = j["horizon_steps"].get<int>();
  if (s.horizon_steps <= 0) throw SchemaError("field 'horizon_steps' must be > 0");
  if (j.contains("replan_steps")) s.replan_steps = j["replan_steps"].get<int>();
  if (s.replan_steps <= 0 || s.replan_steps > s.horizon_steps) {
    throw SchemaError("field 'replan_steps' must be in [1, horizon_steps]");
  }
  if (j.contains("weights")) {
    s.w1 = j["weights"].value("w1", 1.0);
    s.w2 = j["weights"].value("w2", 0.15);
    if (s.w1 < 0 || s.w2 < 0) throw SchemaError("weights must be >= 0");
  }
  if (j.contains("forecast_alpha")) {
    s.forecast_alpha = j["forecast_alpha"].get<double>();
    if (s.forecast_alpha < 0) throw SchemaError("field 'forecast_alpha' must be >= 0");
  }
  if (j.contains("rng_seed")) s.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("volt_var")) {
    s.volt_var.breakpoints.clear();
    for (const auto& bp : j["volt_var"]) {
      s.volt_var.breakpoints.emplace_back(bp[0].get<double>(), bp[1].get<double>());
    }
    s.volt_var.validate();
  }
  if (j.contains("avr")) {
    const auto& ja = j["avr"];
    s.avr.v_ref = ja.value("v_ref", s.avr.v_ref);
    s.avr.bandwidth = ja.value("bandwidth", s.avr.bandwidth);
    s.avr.time_delay_s = ja.value("time_delay_s", s.avr.time_delay_s);
    if (s.avr.bandwidth <= 0) throw SchemaError("field 'avr.bandwidth' must be > 0");
  }
  s.avr.delay_steps =
      static_cast<int>(std::ceil(s.avr.time_delay_s / std::max(1.0, s.dt_s)));
  if (j.contains("milp")) {
    s.milp_time_budget_s = j["milp"].value("time_budget_s", s.milp_time_budget_s);
  }
  if (j.contains("initial_taps") && j["initial_taps"].is_array()) {
    std::vector<int> taps;
    for (const auto& t : j["initial_taps"]) taps.push_back(t.get<int>());
    s.initial_taps = taps;
  }
  if (j.contains("delta_to_max_per_step")) {
    s.delta_to_max_override = j["delta_to_max_per_step"].get<int>();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(),
                        std::filesystem::path(path).parent_path().string());
}

}  // namespace gv
