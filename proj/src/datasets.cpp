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

#include "gridvolt/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "gridvolt/rng.hpp"

namespace gv::datasets {

namespace {

// ---------------------------------------------------------------------------
// Feeder tables: underground cable configurations (ohm/mile, uS/mile),
// line segments (feet), spot loads (kW/kvar per phase).
// ---------------------------------------------------------------------------

struct CableConfig {
  // upper triangle of the symmetric 3x3 phase impedance, ohm/mile
  double z[6][2];  // aa, ab, ac, bb, bc, cc as (r, x)
  double b_us_per_mile;
};

const CableConfig kCfg721{{{0.2926, 0.1973},
                           {0.0673, -0.0368},
                           {0.0337, -0.0417},
                           {0.2646, 0.1900},
                           {0.0673, -0.0368},
                           {0.2926, 0.1973}},
                          159.7919};
const CableConfig kCfg722{{{0.4751, 0.2973},
                           {0.1629, -0.0326},
                           {0.1234, -0.0607},
                           {0.4488, 0.2678},
                           {0.1629, -0.0326},
                           {0.4751, 0.2973}},
                          127.8306};
const CableConfig kCfg723{{{1.2936, 0.6713},
                           {0.4871, 0.2111},
                           {0.4585, 0.1521},
                           {1.3022, 0.6326},
                           {0.4871, 0.2111},
                           {1.2936, 0.6713}},
                          74.8405};
const CableConfig kCfg724{{{2.0952, 0.7758},
                           {0.5204, 0.2738},
                           {0.4926, 0.2123},
                           {2.1068, 0.7398},
                           {0.5204, 0.2738},
                           {2.0952, 0.7758}},
                          60.2483};

const CableConfig& config_by_id(int id) {
  switch (id) {
    case 721: return kCfg721;
    case 722: return kCfg722;
    case 723: return kCfg723;
    default: return kCfg724;
  }
}

struct SegmentRow {
  const char* from;
  const char* to;
  double length_ft;
  int config;
};

const SegmentRow kSegments[] = {
    {"799r", "701", 1850, 721}, {"701", "702", 960, 722},
    {"702", "705", 400, 724},   {"702", "713", 360, 723},
    {"702", "703", 1320, 722},  {"703", "727", 240, 724},
    {"703", "730", 600, 723},   {"704", "714", 80, 724},
    {"704", "720", 800, 723},   {"705", "742", 320, 724},
    {"705", "712", 240, 724},   {"706", "725", 280, 724},
    {"707", "724", 760, 724},   {"707", "722", 120, 724},
    {"708", "733", 320, 723},   {"708", "732", 320, 724},
    {"709", "731", 600, 723},   {"709", "708", 320, 723},
    {"710", "735", 200, 724},   {"710", "736", 1280, 724},
    {"711", "741", 400, 723},   {"711", "740", 200, 724},
    {"713", "704", 520, 723},   {"714", "718", 520, 724},
    {"720", "707", 920, 724},   {"720", "706", 600, 723},
    {"727", "744", 280, 723},   {"730", "709", 200, 723},
    {"733", "734", 560, 723},   {"734", "737", 640, 723},
    {"734", "710", 520, 724},   {"737", "738", 400, 723},
    {"738", "711", 400, 723},   {"744", "728", 200, 724},
    {"744", "729", 280, 724},
};

struct LoadRow {
  const char* bus;
  char phase;
  double kw;
  double kvar;
};

const LoadRow kSpotLoads[] = {
    {"701", 'A', 140, 70}, {"701", 'B', 140, 70}, {"701", 'C', 350, 175},
    {"712", 'C', 85, 40},  {"713", 'C', 85, 40},  {"714", 'A', 17, 8},
    {"714", 'B', 21, 10},  {"718", 'A', 85, 40},  {"720", 'C', 85, 40},
    {"722", 'B', 140, 70}, {"722", 'C', 21, 10},  {"724", 'B', 42, 21},
    {"725", 'B', 42, 21},  {"727", 'C', 42, 21},  {"728", 'A', 42, 21},
    {"728", 'B', 42, 21},  {"728", 'C', 42, 21},  {"729", 'A', 42, 21},
    {"730", 'C', 85, 40},  {"731", 'B', 85, 40},  {"732", 'C', 42, 21},
    {"733", 'A', 85, 40},  {"734", 'C', 42, 21},  {"735", 'C', 85, 40},
    {"736", 'B', 42, 21},  {"737", 'A', 140, 70}, {"738", 'A', 126, 62},
    {"740", 'C', 85, 40},  {"741", 'C', 42, 21},  {"742", 'A', 8, 4},
    {"742", 'B', 85, 40},  {"744", 'A', 42, 21},
};

const char* kLoadAreaBuses[] = {
    "701", "702", "703", "704", "705", "706", "707", "708", "709",
    "710", "711", "712", "713", "714", "718", "720", "722", "724",
    "725", "727", "728", "729", "730", "731", "732", "733", "734",
    "735", "736", "737", "738", "740", "741", "742", "744",
};

Branch make_branch(const SegmentRow& seg) {
  const auto& cfg = config_by_id(seg.config);
  const double miles = seg.length_ft / 5280.0;
  Branch br;
  br.from_bus = seg.from;
  br.to_bus = seg.to;
  br.phases = {Phase::A, Phase::B, Phase::C};
  br.length_km = seg.length_ft * 0.0003048;
  const int map[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  br.series_z_ohm.assign(3, std::vector<cdouble>(3));
  br.shunt_y_siemens.assign(3, std::vector<cdouble>(3, {0.0, 0.0}));
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const auto& e = cfg.z[map[r][c]];
      br.series_z_ohm[r][c] = cdouble(e[0], e[1]) * miles;
    }
    br.shunt_y_siemens[r][r] = cdouble(0.0, cfg.b_us_per_mile * miles * 1e-6);
  }
  return br;
}

double round_to(double v, double quantum) {
  return std::round(v / quantum) * quantum;
}

// Piecewise cubic through (x, y) anchors with finite-difference slopes.
class Spline {
 public:
  Spline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    slope_.resize(n);
    for (size_t i = 0; i < n; ++i) {
      if (i == 0) {
        slope_[i] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
      } else if (i + 1 == n) {
        slope_[i] = (y_[n - 1] - y_[n - 2]) / (x_[n - 1] - x_[n - 2]);
      } else {
        slope_[i] = (y_[i + 1] - y_[i - 1]) / (x_[i + 1] - x_[i - 1]);
      }
    }
  }

  double operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    size_t i = 1;
    while (x_[i] < x) ++i;
    const double h = x_[i] - x_[i - 1];
    const double t = (x - x_[i - 1]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i - 1] + (t3 - 2 * t2 + t) * h * slope_[i - 1] +
           (-2 * t3 + 3 * t2) * y_[i] + (t3 - t2) * h * slope_[i];
  }

 private:
  std::vector<double> x_, y_, slope_;
};

double clear_sky(double hour) {
  constexpr double rise = 6.4, set = 18.9;
  if (hour <= rise || hour >= set) return 0.0;
  const double s = std::sin(std::numbers::pi * (hour - rise) / (set - rise));
  return std::pow(s, 1.2);
}

}  // namespace

FeederModel build_ieee37(std::uint64_t seed, double ac_oversize) {
  FeederModel m;
  const std::vector<Phase> abc{Phase::A, Phase::B, Phase::C};

  m.buses.push_back({"799", abc});
  m.buses.push_back({"799r", abc});
  for (const char* id : kLoadAreaBuses) m.buses.push_back({id, abc});

  for (const auto& seg : kSegments) m.branches.push_back(make_branch(seg));

  OltcDevice reg;
  reg.id = "reg1";
  reg.primary_bus = "799";
  reg.secondary_bus = "799r";
  reg.phases = abc;
  reg.z_t_pu = cdouble(0.015, 0.07);
  reg.tau_min = -16;
  reg.tau_max = 16;
  reg.a_max = 1.1;
  reg.ganged = true;
  reg.delta_to_max = 1;
  m.oltcs.push_back(reg);

  for (const auto& row : kSpotLoads) {
    LoadSpec ld;
    ld.bus = row.bus;
    ld.phase = phase_from_letter(row.phase);
    ld.profile_id = "load_day";
    ld.base_p_kw = row.kw;
    ld.base_q_kvar = row.kvar;
    m.loads.push_back(ld);
  }

  // Seeded PV deployment: 30 units, 23..206 kW DC scaled to 4.1 MW total,
  // AC rating = ac_oversize * DC.
  Rng rng(seed);
  std::vector<std::pair<std::string, Phase>> candidates;
  for (const char* bus : kLoadAreaBuses) {
    for (Phase ph : abc) candidates.emplace_back(bus, ph);
  }
  for (size_t i = 0; i + 1 < candidates.size(); ++i) {
    const size_t j =
        i + static_cast<size_t>(rng.uniform_int(0, candidates.size() - 1 - i));
    std::swap(candidates[i], candidates[j]);
  }

  constexpr int kUnits = 30;
  constexpr double kTotalKw = 4100.0, kMinKw = 23.0, kMaxKw = 206.0;
  std::vector<double> dc(kUnits);
  for (auto& v : dc) v = rng.uniform(kMinKw, kMaxKw);
  for (int pass = 0; pass < 64; ++pass) {
    const double sum = std::accumulate(dc.begin(), dc.end(), 0.0);
    if (std::abs(sum - kTotalKw) < 0.05) break;
    const double scale = kTotalKw / sum;
    for (auto& v : dc) v = std::clamp(v * scale, kMinKw, kMaxKw);
  }

  for (int u = 0; u < kUnits; ++u) {
    PvUnit pv;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "pv%02d", u + 1);
    pv.id = idbuf;
    pv.bus = candidates[u].first;
    pv.phase = candidates[u].second;
    pv.dc_kw = round_to(dc[u], 0.1);
    pv.s_kva = round_to(pv.dc_kw * ac_oversize, 0.1);
    pv.profile_id = pv.id;
    m.pv_units.push_back(pv);
  }

  m.source.bus = "799";
  m.source.phases = {{Phase::A, 1.0, 0.0},
                     {Phase::B, 1.0, -120.0},
                     {Phase::C, 1.0, 120.0}};
  m.bases.s_base_kva = 1000.0;
  m.bases.default_v_base_kv = 4.8 / std::sqrt(3.0);

  m.finalize();
  return m;
}

DayProfiles build_ieee37_day(const FeederModel& feeder, std::uint64_t seed,
                             int steps, double dt_s) {
  DayProfiles out;
  Rng master(seed);
  Rng cloud_rng = master.fork(1);

  // Load shape: overnight base, midday dip, evening peak.
  Spline load_shape({0.0, 3.0, 6.0, 9.0, 11.5, 14.0, 17.0, 19.0, 21.0, 23.0, 24.0},
                    {0.48, 0.40, 0.37, 0.34, 0.31, 0.34, 0.45, 0.60, 0.70, 0.55,
                     0.48});

  out.load_shape.id = "load_day";
  for (int t = 0; t < steps; ++t) {
    const double sec = t * dt_s;
    out.load_shape.timestamps.push_back(sec);
    out.load_shape.values.push_back(round_to(load_shape(sec / 3600.0), 1e-6));
  }

  // Cloud attenuation: seeded two-state process smoothed by an EMA; busier
  // mid-day so PV swings hit the regulation band around noon.
  std::vector<double> shape(steps);
  bool in_cloud = false;
  double target = 1.0, c = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double hour = t * dt_s / 3600.0;
    const double p_enter = (hour > 9.0 && hour < 15.5) ? 0.035 : 0.008;
    const double p_exit = 0.055;
    const double u = cloud_rng.uniform01();
    if (!in_cloud && u < p_enter) {
      in_cloud = true;
      target = 1.0 - cloud_rng.uniform(0.30, 0.75);
    } else if (in_cloud && u < p_exit) {
      in_cloud = false;
      target = 1.0;
    }
    c += 0.30 * (target - c);
    shape[t] = 0.9 * clear_sky(hour) * c;
  }

  for (const auto& pv : feeder.pv_units) {
    TimeSeriesProfile p;
    p.id = pv.profile_id;
    for (int t = 0; t < steps; ++t) {
      p.timestamps.push_back(t * dt_s);
      p.values.push_back(round_to(pv.dc_kw * shape[t], 1e-4));
    }
    out.pv_kw.push_back(std::move(p));
  }
  return out;
}

FeederModel build_synthetic(int n_buses, std::uint64_t seed) {
  FeederModel m;
  Rng rng(seed);
  const std::vector<Phase> abc{Phase::A, Phase::B, Phase::C};

  m.buses.push_back({"src", abc});
  char buf[16];
  for (int i = 0; i < n_buses - 1; ++i) {
    std::snprintf(buf, sizeof(buf), "n%04d", i + 1);
    m.buses.push_back({buf, abc});
  }

  OltcDevice reg;
  reg.id = "reg1";
  reg.primary_bus = "src";
  reg.secondary_bus = "n0001";
  reg.phases = abc;
  reg.z_t_pu = cdouble(0.01, 0.05);
  m.oltcs.push_back(reg);

  // chain of short cfg-722 segments
  for (int i = 1; i + 1 < n_buses; ++i) {
    std::snprintf(buf, sizeof(buf), "n%04d", i);
    const std::string from = buf;
    std::snprintf(buf, sizeof(buf), "n%04d", i + 1);
    Branch br = make_branch(SegmentRow{"", "", 150, 722});
    br.from_bus = from;
    br.to_bus = buf;
    m.branches.push_back(std::move(br));
  }

  for (int i = 5; i + 1 < n_buses; i += 5) {
    std::snprintf(buf, sizeof(buf), "n%04d", i);
    for (Phase ph : abc) {
      LoadSpec ld;
      ld.bus = buf;
      ld.phase = ph;
      ld.profile_id = "load_flat";
      ld.base_p_kw = 10.0 + rng.uniform(0.0, 6.0);
      ld.base_q_kvar = ld.base_p_kw * 0.45;
      ld.base_p_kw = round_to(ld.base_p_kw, 0.1);
      ld.base_q_kvar = round_to(ld.base_q_kvar, 0.1);
      m.loads.push_back(ld);
    }
  }
  int unit = 0;
  for (int i = 9; i + 1 < n_buses; i += 9) {
    std::snprintf(buf, sizeof(buf), "n%04d", i);
    PvUnit pv;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "spv%03d", ++unit);
    pv.id = idbuf;
    pv.bus = buf;
    pv.phase = static_cast<Phase>(unit % 3);
    pv.dc_kw = round_to(40.0 + rng.uniform(0.0, 40.0), 0.1);
    pv.s_kva = round_to(pv.dc_kw * 1.1, 0.1);
    pv.profile_id = pv.id;
    m.pv_units.push_back(pv);
  }

  m.source.bus = "src";
  m.source.phases = {{Phase::A, 1.0, 0.0},
                     {Phase::B, 1.0, -120.0},
                     {Phase::C, 1.0, 120.0}};
  m.bases.s_base_kva = 1000.0;
  m.bases.default_v_base_kv = 4.8 / std::sqrt(3.0);
  m.finalize();
  return m;
}

DayProfiles build_synthetic_day(const FeederModel& feeder, std::uint64_t seed,
                                int steps, double dt_s) {
  DayProfiles out;
  Rng rng(seed);
  out.load_shape.id = "load_flat";
  for (int t = 0; t < steps; ++t) {
    out.load_shape.timestamps.push_back(t * dt_s);
    out.load_shape.values.push_back(0.5);
  }
  for (const auto& pv : feeder.pv_units) {
    TimeSeriesProfile p;
    p.id = pv.profile_id;
    const double frac = 0.55 + rng.uniform(0.0, 0.2);
    for (int t = 0; t < steps; ++t) {
      p.timestamps.push_back(t * dt_s);
      p.values.push_back(round_to(pv.dc_kw * frac, 1e-4));
    }
    out.pv_kw.push_back(std::move(p));
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
}

nlohmann::json scenario_json(const std::string& feeder,
                             const std::string& profiles, int steps,
                             double milp_budget_s) {
  nlohmann::json j;
  j["feeder"] = feeder;
  j["profiles_dir"] = profiles;
  j["method"] = "ovr";
  j["steps"] = steps;
  j["dt_s"] = 30.0;
  j["horizon_steps"] = 10;
  j["replan_steps"] = 10;
  j["weights"] = {{"w1", 1.0}, {"w2", 0.15}};
  j["forecast_alpha"] = 0.0;
  j["rng_seed"] = kBundleSeed;
  j["volt_var"] = nlohmann::json::array(
      {{0.92, 1.0}, {0.98, 0.0}, {1.02, 0.0}, {1.08, -1.0}});
  j["avr"] = {{"v_ref", 1.03}, {"bandwidth", 0.0167}, {"time_delay_s", 0.0}};
  j["milp"] = {{"time_budget_s", milp_budget_s}};
  return j;
}

}  // namespace

void write_bundle(const std::string& dir, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "profiles");
  fs::create_directories(fs::path(dir) / "profiles_synthetic");

  FeederModel ieee37 = build_ieee37(seed);
  write_text((fs::path(dir) / "ieee37.json").string(),
             serialize_feeder(ieee37) + "\n");
  DayProfiles day = build_ieee37_day(ieee37, seed);
  save_profile(day.load_shape,
               (fs::path(dir) / "profiles" / "load_day.csv").string());
  for (const auto& p : day.pv_kw) {
    save_profile(p, (fs::path(dir) / "profiles" / (p.id + ".csv")).string());
  }
  write_text((fs::path(dir) / "scenario_ieee37_cloudy.json").string(),
             scenario_json("ieee37.json", "profiles", 2880, 20.0).dump(2) + "\n");

  FeederModel syn = build_synthetic(360, seed);
  write_text((fs::path(dir) / "synthetic_1080.json").string(),
             serialize_feeder(syn) + "\n");
  DayProfiles sday = build_synthetic_day(syn, seed, 20, 30.0);
  save_profile(sday.load_shape,
               (fs::path(dir) / "profiles_synthetic" / "load_flat.csv").string());
  for (const auto& p : sday.pv_kw) {
    save_profile(
        p, (fs::path(dir) / "profiles_synthetic" / (p.id + ".csv")).string());
  }
  auto sj = scenario_json("synthetic_1080.json", "profiles_synthetic", 10, 540.0);
  write_text((fs::path(dir) / "scenario_synthetic_1080.json").string(),
             sj.dump(2) + "\n");
}

}  // namespace gv::datasets
