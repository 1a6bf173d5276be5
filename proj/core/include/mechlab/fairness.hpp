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

#ifndef MECHLAB_FAIRNESS_HPP_
#define MECHLAB_FAIRNESS_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mechlab/mechanism.hpp"
#include "mechlab/model.hpp"

namespace mechlab {

// Direction angle of a slope in [0, pi): atan(m) for m >= 0, atan(m) + pi
// for m < 0, pi/2 for +-infinity.
double angle(double slope);

// Distance between two direction angles with d and -d identified.
double line_distance(double a, double b);

struct JumpData {
  double x = 0.0;
  double x_plus = 0.0;
  double q = 0.0;
  double q_plus = 0.0;
};

enum class SlopeKind { kMRS, kDiff };

struct IsoSlope {
  double slope = 0.0;
  SlopeKind kind = SlopeKind::kMRS;
};

// s_MRS = [v_x / z_q] [z_alpha_q / v_beta_x].
IsoSlope iso_slope(const NonlinearUtilitySpec& spec, const Type& t, double x, double q);
// s_diff from one-sided differences; throws kDegenerateJump for a zero jump.
IsoSlope iso_slope(const NonlinearUtilitySpec& spec, const Type& t, const JumpData& jump);
// Payment analogue [v_x / w_p] [w_alpha_p / v_beta_x].
double payment_slope(const NonlinearUtilitySpec& spec, const Type& t, double x, double p);

struct SlopeBound {
  double m = 0.0;    // (1 - safety) * raw
  double raw = 0.0;  // largest sampled slope
  double safety = 0.05;
  Type argmax;
  std::size_t n_slopes = 0;
};

// Samples an n x n lattice over the closed rectangle and a fixed set of
// levels x, x+ in [0, 1] and q, q+ in [0, q_bar].
SlopeBound slope_bound_M(const NonlinearUtilitySpec& spec, const TypeSpace& space, double q_bar,
                         std::size_t n_samples = 21);

struct PaymentBound {
  double value = 0.0;
  Type argmin;
};

// min over nodes of |pi/2 - angle(iso-merit slope)|.
PaymentBound payment_lower_bound(const MeritFunction& merit, const Grid& grid);

// Points of a discontinuity curve with the slope of the curve at each.
struct JumpCurve {
  std::vector<Type> points;
  std::vector<double> slopes;
};

// Allocation values on a grid, with an optional exact evaluator (used for
// small-step differences) and analytic jump curves.
class AllocationField {
 public:
  AllocationField(Grid grid, std::vector<double> x,
                  std::function<double(const Type&)> exact = {},
                  std::vector<JumpCurve> jumps = {});

  // Closed-form mechanisms get an exact evaluator.  Mechanisms with known
  // discontinuities also get their analytic jump curves (boundary endpoints
  // dropped).
  // The exact evaluator refers to mech, which must outlive the field.
  static AllocationField from_mechanism(const Mechanism& mech, const Grid& grid);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return x_; }
  const std::vector<JumpCurve>& jumps() const { return jumps_; }
  bool has_exact() const { return static_cast<bool>(exact_); }
  double range() const { return range_; }

  // Exact value when available, else bilinear interpolation clamped to the grid hull.
  double value(const Type& t) const;
  // Central differences at node (i, j), one-sided on the hull edges.
  std::pair<double, double> gradient(std::size_t i, std::size_t j) const;
  std::vector<std::pair<double, double>> gradient_field() const;
  double probe_step() const;

 private:
  Grid grid_;
  std::vector<double> x_;
  std::function<double(const Type&)> exact_;
  std::vector<JumpCurve> jumps_;
  double range_ = 0.0;
};

// Largest-angle measure at interior node (i, j); +infinity when no sampled
// direction is locally constant.
double local_violation(const AllocationField& field, const MeritFunction& merit, std::size_t i,
                       std::size_t j, double tau = 1e-3);

struct ViolationReport {
  std::vector<double> local;  // per node; NaN on the hull boundary
  double global = 0.0;        // may be +infinity
  Type witness;
  bool witness_on_jump = false;
  std::size_t n_interior = 0;
  std::size_t n_jump_points = 0;
  double resolution = 0.0;  // direction sampling step in radians
};

ViolationReport global_violation(const AllocationField& field, const MeritFunction& merit,
                                 double tau = 1e-3);

struct ComparisonReport {
  SlopeBound bound;
  PaymentBound payment_bound;
  double ordeal_violation = 0.0;  // L(x_q)
  double q_b = 0.0;
  bool verdict = false;  // L(x_q) < payment bound
  ViolationReport violations;
};

// Throws kNotApplicable when some iso-merit slope on the grid is not flatter
// than M.
ComparisonReport compare_instruments(const NonlinearUtilitySpec& spec, const MeritFunction& merit,
                                     const Grid& grid, const Type& anchor, double x_b,
                                     double tau = 1e-3);

}  // namespace mechlab

#endif  // MECHLAB_FAIRNESS_HPP_
