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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gridvolt/lp.hpp"
#include "gridvolt/rng.hpp"
#include "support/dense_lp.hpp"

using namespace gv;
using namespace gv::lp;

TEST_CASE("min x over a box") {
  LpBuilder b;
  b.add_col("x", 0.0, 1.0, 1.0);
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(sol.x[0] == doctest::Approx(0.0));
}

TEST_CASE("absolute-value gadget: min |v - 1| with v fixed at 0.97") {
  LpBuilder b;
  const int v = b.add_col("v", 0.97, 0.97, 0.0);
  const int d = b.add_col("d", 0.0, kInf, 1.0);
  b.add_row("dev_hi", -1.0, kInf, {{d, 1.0}, {v, -1.0}});  // d >= v - 1
  b.add_row("dev_lo", 1.0, kInf, {{d, 1.0}, {v, 1.0}});    // d >= 1 - v
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(0.03).epsilon(1e-9));
}

TEST_CASE("equality row with boxed columns") {
  LpBuilder b;
  const int x = b.add_col("x", 0.0, 0.8, -1.0);
  const int y = b.add_col("y", 0.0, 0.8, -1.0);
  b.add_row("sum", 1.0, 1.0, {{x, 1.0}, {y, 1.0}});
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("range row") {
  LpBuilder b;
  const int x = b.add_col("x", -5.0, 5.0, 1.0);
  const int y = b.add_col("y", -5.0, 5.0, 2.0);
  b.add_row("rng", 1.0, 3.0, {{x, 1.0}, {y, 1.0}});
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  // obj = (x+y) + y >= 1 + y; y = -5 forces x = 6 > ub, so x = 5, y = -4.
  CHECK(sol.objective == doctest::Approx(-3.0));
  CHECK(sol.row_activity[0] == doctest::Approx(1.0));
}

TEST_CASE("infeasible instance names a row") {
  LpBuilder b;
  const int x = b.add_col("x", 0.0, 1.0, 0.0);
  const int y = b.add_col("y", 0.0, 1.0, 0.0);
  b.add_row("impossible", 3.0, 3.0, {{x, 1.0}, {y, 1.0}});
  auto sol = solve_lp(b.build());
  CHECK(sol.status == LpStatus::kInfeasible);
  CHECK(sol.infeasible_row == "impossible");
}

TEST_CASE("unbounded instance is flagged") {
  LpBuilder b;
  b.add_col("x", 0.0, kInf, -1.0);
  auto sol = solve_lp(b.build());
  CHECK(sol.status == LpStatus::kUnbounded);
}

TEST_CASE("free variables") {
  LpBuilder b;
  const int x = b.add_col("x", -kInf, kInf, 1.0);
  const int y = b.add_col("y", 0.0, 2.0, 0.5);
  b.add_row("r1", 4.0, 4.0, {{x, 1.0}, {y, 2.0}});
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  // x = 4 - 2y, obj = 4 - 2y + 0.5y = 4 - 1.5y -> y = 2, x = 0, obj = 1
  CHECK(sol.objective == doctest::Approx(1.0));
}

TEST_CASE("degenerate rows do not cycle") {
  LpBuilder b;
  const int x = b.add_col("x", 0.0, 1.0, -1.0);
  const int y = b.add_col("y", 0.0, 1.0, -1.0);
  for (int k = 0; k < 6; ++k) {
    b.add_row("dup" + std::to_string(k), -kInf, 1.0, {{x, 1.0}, {y, 1.0}});
  }
  auto sol = solve_lp(b.build());
  REQUIRE(sol.status == LpStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
}

namespace {

// Random boxed instance that is feasible (a known interior point builds the
// row bounds) and bounded (every column boxed).
lp::LpInstance random_instance(Rng& rng, int n_vars, int n_rows) {
  LpBuilder b;
  std::vector<double> x0(n_vars);
  for (int j = 0; j < n_vars; ++j) {
    const double lo = rng.uniform(-4.0, 0.0);
    const double hi = lo + rng.uniform(0.5, 5.0);
    x0[j] = rng.uniform(lo, hi);
    b.add_col("x" + std::to_string(j), lo, hi, rng.uniform(-2.0, 2.0));
  }
  for (int r = 0; r < n_rows; ++r) {
    std::vector<std::pair<int, double>> entries;
    double act = 0.0;
    for (int j = 0; j < n_vars; ++j) {
      if (rng.uniform01() < 0.6) {
        const double v = rng.uniform(-3.0, 3.0);
        entries.emplace_back(j, v);
        act += v * x0[j];
      }
    }
    if (entries.empty()) continue;
    const int kind = static_cast<int>(rng.uniform_int(0, 2));
    if (kind == 0) {
      b.add_row("eq" + std::to_string(r), act, act, entries);
    } else if (kind == 1) {
      b.add_row("le" + std::to_string(r), -kInf, act + rng.uniform(0.0, 1.0),
                entries);
    } else {
      b.add_row("ge" + std::to_string(r), act - rng.uniform(0.0, 1.0), kInf,
                entries);
    }
  }
  return b.build();
}

}  // namespace

TEST_CASE("random LPs match the dense reference to 1e-6") {
  Rng rng(20260809);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 9));
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 7));
    auto lp_inst = random_instance(rng, n, m);
    auto mine = solve_lp(lp_inst);
    auto ref = gvtest::solve_dense_reference(lp_inst);
    REQUIRE(mine.status == LpStatus::kOptimal);
    REQUIRE(ref.optimal);
    CHECK(mine.objective ==
          doctest::Approx(ref.objective).epsilon(1e-6).scale(1.0));
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("solutions satisfy all constraints to 1e-7") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto lp_inst = random_instance(rng, 8, 5);
    auto sol = solve_lp(lp_inst);
    REQUIRE(sol.status == LpStatus::kOptimal);
    for (int j = 0; j < lp_inst.n_cols; ++j) {
      CHECK(sol.x[j] >= lp_inst.col_lb[j] - 1e-7);
      CHECK(sol.x[j] <= lp_inst.col_ub[j] + 1e-7);
    }
    // recompute activities independently
    Eigen::VectorXd act = Eigen::VectorXd::Zero(lp_inst.n_rows);
    for (int j = 0; j < lp_inst.n_cols; ++j) {
      for (int k = lp_inst.col_ptr[j]; k < lp_inst.col_ptr[j + 1]; ++k) {
        act[lp_inst.row_idx[k]] += lp_inst.value[k] * sol.x[j];
      }
    }
    for (int r = 0; r < lp_inst.n_rows; ++r) {
      CHECK(act[r] >= lp_inst.row_lb[r] - 1e-6);
      CHECK(act[r] <= lp_inst.row_ub[r] + 1e-6);
      CHECK(act[r] == doctest::Approx(sol.row_activity[r]).epsilon(1e-9));
    }
  }
}

TEST_CASE("warm start from a perturbed-bound parent basis") {
  Rng rng(7);
  auto lp_inst = random_instance(rng, 10, 6);
  auto cold = solve_lp(lp_inst);
  REQUIRE(cold.status == LpStatus::kOptimal);

  // tighten one column like a branching step would
  lp::LpInstance child = lp_inst;
  child.col_ub[0] = (lp_inst.col_lb[0] + lp_inst.col_ub[0]) / 2.0;
  auto warm = solve_lp(child, {}, &cold.basis);
  auto scratch = solve_lp(child);
  REQUIRE(warm.status == scratch.status);
  if (warm.status == LpStatus::kOptimal) {
    CHECK(warm.objective == doctest::Approx(scratch.objective).epsilon(1e-7));
  }
}

TEST_CASE("determinism: identical instances give identical iterates") {
  Rng rng(5);
  auto lp_inst = random_instance(rng, 12, 8);
  auto a = solve_lp(lp_inst);
  auto b = solve_lp(lp_inst);
  REQUIRE(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  for (int j = 0; j < lp_inst.n_cols; ++j) {
    CHECK(a.x[j] == b.x[j]);
  }
}

TEST_CASE("lp format dump mentions integer columns") {
  LpBuilder b;
  const int x = b.add_col("tap", -2.0, 2.0, 0.0, /*integer=*/true);
  const int y = b.add_col("q", -1.0, 1.0, 1.0);
  b.add_row("link", 0.0, 0.0, {{x, 0.1}, {y, 1.0}});
  const std::string path = "/tmp/gv_test_dump.lp";
  write_lp_format(b.build(), path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("Generals") != std::string::npos);
  CHECK(text.find("tap") != std::string::npos);
  CHECK(text.find("Minimize") != std::string::npos);
  std::remove(path.c_str());
}
