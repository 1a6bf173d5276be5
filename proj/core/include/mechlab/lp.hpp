// Copyright 2026 The mechlab Authors.
//
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

#ifndef MECHLAB_LP_HPP_
#define MECHLAB_LP_HPP_

#include <cstddef>
#include <vector>

namespace mechlab {

// maximize c'y  subject to  A y <= b,  y_j >= 0 unless free[j].
struct LinearProgram {
  std::size_t n_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<bool> free;  // empty means all variables are nonnegative

  void add_row(std::vector<double> a, double b) {
    rows.push_back(std::move(a));
    rhs.push_back(b);
  }
};

struct LPSolution {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  double value = 0.0;
  std::vector<double> y;
  std::size_t pivots = 0;
};

// Dense two-phase simplex (Dantzig pricing, Harris ratio test) on a slightly
// loosened rhs; the reported point is the final basis solved against the
// exact rhs.  Throws kSolverFailure when the pivot limit is hit.
LPSolution solve_lp(const LinearProgram& lp);

// Largest violation max(A y - b) (<= 0 when y is feasible); ignores sign bounds.
double max_violation(const LinearProgram& lp, const std::vector<double>& y);

}  // namespace mechlab

#endif  // MECHLAB_LP_HPP_
