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

#ifndef GRIDVOLT_FORECAST_HPP
#define GRIDVOLT_FORECAST_HPP

#include <cstdint>

#include "gridvolt/netmodel.hpp"

namespace gv {

struct ForecastResult {
  TimeSeriesProfile profile;
  int negative_clips = 0;
};

/// Multiplicative noise model: y(t) = (1 + alpha * eps(t)) * y_true(t) with
/// eps drawn uniformly from [-1, 1] by a seeded generator. alpha = 0
/// reproduces the input bit-exactly. Negative results clip to zero with a
/// count of clip events.
ForecastResult make_forecast(const TimeSeriesProfile& truth, double alpha,
                             std::uint64_t seed);

}  // namespace gv

#endif  // GRIDVOLT_FORECAST_HPP
