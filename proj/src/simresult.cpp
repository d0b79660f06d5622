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

#include "gridvolt/simresult.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace gv {

long tap_operations(const Eigen::VectorXi& trajectory) {
  long ops = 0;
  for (int t = 1; t < trajectory.size(); ++t) {
    ops += std::abs(trajectory[t] - trajectory[t - 1]);
  }
  return ops;
}

Metrics compute_metrics(const SimulationResult& r) {
  Metrics m;
  const int n = static_cast<int>(r.node_names.size());
  const double minutes_per_step = r.dt_s / 60.0;

  double dev_sum = 0.0;
  long dev_count = 0;
  for (int t = 0; t < r.steps; ++t) {
    for (int k = 0; k < n; ++k) {
      if (r.slack_mask[k]) continue;
      const double dev = std::abs(r.vmag(t, k) - 1.0);
      dev_sum += dev;
      ++dev_count;
      m.max_abs_dev = std::max(m.max_abs_dev, dev);
      if (r.vmag(t, k) > 1.05) m.over_voltage_node_minutes += minutes_per_step;
      if (r.vmag(t, k) < 0.95) m.under_voltage_node_minutes += minutes_per_step;
    }
  }
  m.mean_abs_dev = dev_count ? dev_sum / dev_count : 0.0;

  double unb_sum = 0.0;
  long unb_count = 0;
  for (int t = 0; t < r.steps; ++t) {
    for (const auto& [first, last] : r.bus_node_spans) {
      if (last - first < 1) continue;  // single-phase bus
      double lo = r.vmag(t, first), hi = r.vmag(t, first);
      for (int k = first + 1; k <= last; ++k) {
        lo = std::min(lo, r.vmag(t, k));
        hi = std::max(hi, r.vmag(t, k));
      }
      const double unb = hi - lo;
      unb_sum += unb;
      ++unb_count;
      m.max_unbalance = std::max(m.max_unbalance, unb);
    }
  }
  m.mean_unbalance = unb_count ? unb_sum / unb_count : 0.0;

  for (int p = 0; p < r.taps.cols(); ++p) {
    m.total_tap_ops += tap_operations(r.taps.col(p));
  }
  m.degraded_steps = static_cast<int>(r.degraded_step_list.size());
  m.max_pf_mismatch = r.max_pf_mismatch;
  return m;
}

void write_result_dir(const SimulationResult& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create result directory '" + dir + "'");
  char buf[160];

  {
    std::ofstream out(fs::path(dir) / "voltages.csv", std::ios::binary);
    if (!out) throw IoError("cannot write voltages.csv");
    out << "step,node,vmag\n";
    for (int t = 0; t < r.steps; ++t) {
      for (size_t k = 0; k < r.node_names.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.8f\n", t,
                      r.node_names[k].c_str(), r.vmag(t, static_cast<int>(k)));
        out << buf;
      }
    }
  }
  {
    std::ofstream out(fs::path(dir) / "taps.csv", std::ios::binary);
    if (!out) throw IoError("cannot write taps.csv");
    out << "step,oltc,tap\n";
    for (int t = 0; t < r.steps; ++t) {
      for (size_t p = 0; p < r.oltc_ids.size(); ++p) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%d\n", t, r.oltc_ids[p].c_str(),
                      r.taps(t, static_cast<int>(p)));
        out << buf;
      }
    }
  }
  {
    std::ofstream out(fs::path(dir) / "si_q.csv", std::ios::binary);
    if (!out) throw IoError("cannot write si_q.csv");
    out << "step,unit,q_kvar\n";
    for (int t = 0; t < r.steps; ++t) {
      for (size_t u = 0; u < r.unit_ids.size(); ++u) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.4f\n", t, r.unit_ids[u].c_str(),
                      r.si_q_kvar(t, static_cast<int>(u)));
        out << buf;
      }
    }
  }
  {
    nlohmann::json j;
    j["method"] = r.method;
    j["steps"] = r.steps;
    j["dt_s"] = r.dt_s;
    j["mean_abs_dev"] = r.metrics.mean_abs_dev;
    j["max_abs_dev"] = r.metrics.max_abs_dev;
    j["total_tap_ops"] = r.metrics.total_tap_ops;
    j["mean_unbalance"] = r.metrics.mean_unbalance;
    j["max_unbalance"] = r.metrics.max_unbalance;
    j["over_voltage_node_minutes"] = r.metrics.over_voltage_node_minutes;
    j["under_voltage_node_minutes"] = r.metrics.under_voltage_node_minutes;
    j["degraded_steps"] = r.metrics.degraded_steps;
    j["max_pf_mismatch"] = r.metrics.max_pf_mismatch;
    std::ofstream out(fs::path(dir) / "metrics.json", std::ios::binary);
    if (!out) throw IoError("cannot write metrics.json");
    out << j.dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(dir) / "summary.txt", std::ios::binary);
    if (!out) throw IoError("cannot write summary.txt");
    out << "method: " << r.method << "\n"
        << "steps: " << r.steps << " x " << r.dt_s << " s\n"
        << "mean |dev|: " << r.metrics.mean_abs_dev << " pu\n"
        << "max  |dev|: " << r.metrics.max_abs_dev << " pu\n"
        << "tap operations: " << r.metrics.total_tap_ops << "\n"
        << "mean unbalance: " << r.metrics.mean_unbalance << " pu\n"
        << "max  unbalance: " << r.metrics.max_unbalance << " pu\n"
        << "over-voltage node-minutes:  " << r.metrics.over_voltage_node_minutes
        << "\n"
        << "under-voltage node-minutes: "
        << r.metrics.under_voltage_node_minutes << "\n"
        << "degraded steps: " << r.metrics.degraded_steps << "\n"
        << "max power-flow mismatch: " << r.metrics.max_pf_mismatch << " pu\n";
  }
}

Metrics read_metrics_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  Metrics m;
  m.mean_abs_dev = j.value("mean_abs_dev", 0.0);
  m.max_abs_dev = j.value("max_abs_dev", 0.0);
  m.total_tap_ops = j.value("total_tap_ops", 0L);
  m.mean_unbalance = j.value("mean_unbalance", 0.0);
  m.max_unbalance = j.value("max_unbalance", 0.0);
  m.over_voltage_node_minutes = j.value("over_voltage_node_minutes", 0.0);
  m.under_voltage_node_minutes = j.value("under_voltage_node_minutes", 0.0);
  m.degraded_steps = j.value("degraded_steps", 0);
  m.max_pf_mismatch = j.value("max_pf_mismatch", 0.0);
  return m;
}

}  // namespace gv
