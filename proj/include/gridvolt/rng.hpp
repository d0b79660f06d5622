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

#ifndef GRIDVOLT_RNG_HPP
#define GRIDVOLT_RNG_HPP

#include <cstdint>
#include <random>

namespace gv {

// Seeded generator with reproducible draws. std::mt19937_64 is fully
// specified by the standard; the scaling below avoids the
// implementation-defined std::uniform_real_distribution so that identical
// seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in [-1, 1).
  double uniform_sym() { return 2.0 * uniform01() - 1.0; }

  /// Uniform integer in [lo, hi] via rejection-free modulo on a 64-bit draw.
  /// Bias is below 2^-50 for the ranges used here.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(eng_() % span);
  }

  /// Derive an independent stream for a named sub-purpose.
  Rng fork(std::uint64_t stream_id) {
    return Rng(eng_() ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gv

#endif  // GRIDVOLT_RNG_HPP
