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

#ifndef MECHLAB_CONSTRUCT_HPP_
#define MECHLAB_CONSTRUCT_HPP_

#include <cstddef>
#include <vector>

#include "mechlab/mechanism.hpp"
#include "mechlab/model.hpp"
#include "mechlab/reparam.hpp"

namespace mechlab {

// zeta = max(M2, 1e-6) * (1 + margin); psi = M1 + zeta * lambda_span + 1.
// The result always satisfies zeta > M2 and psi >= M1 + zeta * span, which
// makes V convex and the ordeal rule positive on the rectangle.
ThresholdConstants choose_constants(const CurvatureBounds& bounds,
                                    const ReparamRectangle& rectangle, double margin);

// Throws kBadThreshold when eta_star lies outside the closed merit range.
ThresholdMechanism build_threshold(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                   const TypeSpace& space, double eta_star, Side side,
                                   const ThresholdConstants& constants,
                                   std::size_t curve_samples = 1001);

// build_threshold with constants from curvature_bounds + choose_constants.
ThresholdMechanism build_certified_threshold(const LinearUtilitySpec& spec,
                                             const MeritFunction& merit,
                                             const TypeSpace& space, double eta_star,
                                             Side side, double margin = 0.25,
                                             std::size_t curve_samples = 1001);

struct DecompositionTerm {
  double weight = 0.0;
  double eta_star = 0.0;
  Side side = Side::kLow;
};

struct Decomposition {
  std::vector<DecompositionTerm> terms;
  double sup_error_bound = 0.0;  // certified sup-norm gap to x_hat on the merit range
};

// Finite threshold decomposition of x_hat: thresholds at the n uniform
// quantiles of the merit range (plus any step-table jumps), weights equal to
// increments of right limits, and the base level x_hat(eta_lo+) placed on an
// allocate-to-everyone threshold at eta_lo.
Decomposition decompose_increasing(const IncreasingAllocation& xhat, std::size_t n,
                                   const MeritRange& range);

MixtureMechanism build_mixture(const LinearUtilitySpec& spec, const MeritFunction& merit,
                               const TypeSpace& space, const IncreasingAllocation& xhat,
                               std::size_t n, double margin = 0.25,
                               std::size_t curve_samples = 1001);

Mechanism as_mechanism(const LinearUtilitySpec& spec, ThresholdMechanism m);
Mechanism as_mechanism(const LinearUtilitySpec& spec, MixtureMechanism m);

// Observable alpha: envelope menus in beta for each alpha slice.  The grid
// fixes the type space; the result is closed-form.  Throws kNotMonotone via
// IncreasingAllocation when x_hat decreases.
Mechanism build_conditional(const LinearUtilitySpec& spec, const MeritFunction& merit,
                            const IncreasingAllocation& xhat, Instrument instrument,
                            const Grid& grid);

// Posted ordeal q_star for merit functions that are an increasing transform
// of beta / z(alpha).  Throws kNotKnifeEdge otherwise.
Mechanism build_knife_edge_ordeal(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                  const TypeSpace& space, double q_star);

// Solves v(beta_b, x_b) = z(alpha_b, q_b) for q_b in [0, q_bar]; throws
// kOrdealCapExceeded when no such q_b exists.
Mechanism build_one_step_ordeal(const NonlinearUtilitySpec& spec, const TypeSpace& space,
                                const Type& anchor, double x_b);

Mechanism build_payment_screen(const LinearUtilitySpec& spec, const TypeSpace& space,
                               double center, double width);

}  // namespace mechlab

#endif  // MECHLAB_CONSTRUCT_HPP_
