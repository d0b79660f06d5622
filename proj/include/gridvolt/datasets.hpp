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

#ifndef GRIDVOLT_DATASETS_HPP
#define GRIDVOLT_DATASETS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gridvolt/netmodel.hpp"

namespace gv::datasets {

/// Seed behind the bundled deployment; regeneration with this seed
/// reproduces data/ bit-for-bit.
constexpr std::uint64_t kBundleSeed = 2026'08'09;

/// IEEE-37-derived three-phase feeder: published topology, underground
/// cable impedance configurations, and spot loads; substation OLTC
/// (tau -16..16, ratio 0.9..1.1); 30 seeded PV units of 23..206 kW DC
/// totalling ~4.1 MW with 10% AC oversizing.
FeederModel build_ieee37(std::uint64_t seed = kBundleSeed,
                         double ac_oversize = 1.1);

struct DayProfiles {
  TimeSeriesProfile load_shape;            // multiplier, id "load_day"
  std::vector<TimeSeriesProfile> pv_kw;    // one per PV unit, id = profile id
};

/// Synthetic partly-cloudy day: clear-sky envelope times a seeded two-state
/// cloud attenuation process, plus a smooth double-hump load shape.
DayProfiles build_ieee37_day(const FeederModel& feeder,
                             std::uint64_t seed = kBundleSeed, int steps = 2880,
                             double dt_s = 30.0);

/// Radial three-phase chain feeder with >= n_buses buses, one substation
/// OLTC, sparse loads and PV; used by the scalability smoke test.
FeederModel build_synthetic(int n_buses, std::uint64_t seed = kBundleSeed);

DayProfiles build_synthetic_day(const FeederModel& feeder,
                                std::uint64_t seed = kBundleSeed,
                                int steps = 2880, double dt_s = 30.0);

/// Writes the complete bundled dataset (feeders, profiles, scenarios) under
/// `dir`. Deterministic: same seed, same bytes.
void write_bundle(const std::string& dir, std::uint64_t seed = kBundleSeed);

}  // namespace gv::datasets

#endif  // GRIDVOLT_DATASETS_HPP
