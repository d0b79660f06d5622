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

#include "gridvolt/forecast.hpp"

#include "gridvolt/rng.hpp"

namespace gv {

ForecastResult make_forecast(const TimeSeriesProfile& truth, double alpha,
                             std::uint64_t seed) {
  if (alpha < 0.0) throw NumericError("forecast alpha must be >= 0");
  ForecastResult out;
  out.profile = truth;
  if (alpha == 0.0) return out;  // bit-exact copy
  Rng rng(seed);
  for (double& v : out.profile.values) {
    v *= 1.0 + alpha * rng.uniform_sym();
    if (v < 0.0) {
      v = 0.0;
      ++out.negative_clips;
    }
  }
  return out;
}

}  // namespace gv
