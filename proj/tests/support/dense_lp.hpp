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

#ifndef GRIDVOLT_TESTS_DENSE_LP_HPP
#define GRIDVOLT_TESTS_DENSE_LP_HPP

#include <Eigen/Dense>

#include "gridvolt/lp.hpp"

namespace gvtest {

struct DenseLpResult {
  bool optimal = false;
  bool infeasible = false;
  bool unbounded = false;
  double objective = 0.0;
  Eigen::VectorXd x;  // original column space
};

/// Independent reference: converts the instance to standard form
/// (shift/split variables, slack rows, artificials) and runs a dense
/// two-phase full-tableau simplex with Bland's rule. Slow and simple on
/// purpose; shares no code with the production solver.
DenseLpResult solve_dense_reference(const gv::lp::LpInstance& lp);

}  // namespace gvtest

#endif  // GRIDVOLT_TESTS_DENSE_LP_HPP
