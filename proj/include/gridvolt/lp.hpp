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

#ifndef GRIDVOLT_LP_HPP
#define GRIDVOLT_LP_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gridvolt/common.hpp"

namespace gv::lp {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Sparse LP in computational form:
///   minimize c^T x + obj_offset
///   subject to row_lb <= A x <= row_ub, col_lb <= x <= col_ub.
/// Equality rows have row_lb == row_ub. Columns are stored CSC.
struct LpInstance {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<int> col_ptr;   // size n_cols + 1
  std::vector<int> row_idx;   // size nnz
  std::vector<double> value;  // size nnz
  std::vector<double> obj;
  double obj_offset = 0.0;
  std::vector<double> col_lb, col_ub;
  std::vector<double> row_lb, row_ub;
  std::vector<std::uint8_t> integer_mark;  // per column
  std::vector<std::string> col_name, row_name;

  int nnz() const { return static_cast<int>(row_idx.size()); }
};

/// Incremental construction: add columns first, then rows as index/value
/// entry lists. Duplicate column entries within a row are summed.
class LpBuilder {
 public:
  int add_col(std::string name, double lb, double ub, double obj,
              bool integer = false);
  int add_row(std::string name, double lb, double ub,
              const std::vector<std::pair<int, double>>& entries);
  void set_obj_offset(double v) { offset_ = v; }

  int n_cols() const { return static_cast<int>(col_lb_.size()); }
  int n_rows() const { return static_cast<int>(row_lb_.size()); }

  LpInstance build() const;

 private:
  std::vector<std::string> col_names_, row_names_;
  std::vector<double> col_lb_, col_ub_, obj_;
  std::vector<std::uint8_t> integer_;
  std::vector<double> row_lb_, row_ub_;
  std::vector<int> trip_row_, trip_col_;
  std::vector<double> trip_val_;
  double offset_ = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterLimit };

/// Variable position in a simplex basis. Index space is structural columns
/// followed by one logical per row.
enum class VarState : std::int8_t { kAtLower, kAtUpper, kBasic, kFreeZero };

struct Basis {
  std::vector<VarState> state;  // size n_cols + n_rows
};

struct LpSolution {
  LpStatus status = LpStatus::kIterLimit;
  double objective = 0.0;
  Eigen::VectorXd x;             // structural values
  Eigen::VectorXd row_activity;  // A x
  Eigen::VectorXd dual;          // simplex multipliers y per row
  int iterations = 0;
  std::string infeasible_row;    // named row that could not be satisfied
  Basis basis;                   // final basis, reusable as a warm start
};

struct SimplexOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 64;
  long max_iterations = -1;  // -1: scale with problem size
};

/// Bounded-variable primal simplex with a sparse LU basis and product-form
/// updates. Deterministic: fixed scan orders, index tie-breaking.
LpSolution solve_lp(const LpInstance& lp, const SimplexOptions& opts = {},
                    const Basis* warm_start = nullptr);

/// Writes the instance in CPLEX LP text format (range rows emitted as two
/// inequalities; integer columns listed under Generals).
void write_lp_format(const LpInstance& lp, const std::string& path);

}  // namespace gv::lp

#endif  // GRIDVOLT_LP_HPP
