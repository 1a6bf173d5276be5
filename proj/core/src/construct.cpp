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

#include "mechlab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mechlab/error.hpp"
#include "mechlab/verify.hpp"
#include "numeric.hpp"

namespace mechlab {

ThresholdConstants choose_constants(const CurvatureBounds& bounds,
                                    const ReparamRectangle& rectangle, double margin) {
  if (!std::isfinite(bounds.m1) || !std::isfinite(bounds.m2) || !(margin > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "curvature bounds must be finite, margin > 0");
  }
  const double zeta = std::max(bounds.m2, 1e-6) * (1.0 + margin);
  const double psi = bounds.m1 + zeta * rectangle.lambda_span() + 1.0;
  return {psi, zeta};
}

ThresholdMechanism build_threshold(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                   const TypeSpace& space, double eta_star, Side side,
                                   const ThresholdConstants& constants,
                                   std::size_t curve_samples) {
  const MeritRange range = merit_range(merit, space);
  if (!(eta_star >= range.lo && eta_star <= range.hi)) {
    throw Error(ErrorCode::kBadThreshold,
                "threshold " + std::to_string(eta_star) + " outside merit range [" +
                    std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
  }
  if (!(constants.psi > 0.0) || !(constants.zeta >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need psi > 0 and zeta >= 0");
  }
  return ThresholdMechanism(spec, merit, eta_star, side, constants,
                            bounding_rectangle(spec, space), curve_samples);
}

ThresholdMechanism build_certified_threshold(const LinearUtilitySpec& spec,
                                             const MeritFunction& merit,
                                             const TypeSpace& space, double eta_star,
                                             Side side, double margin,
                                             std::size_t curve_samples) {
  const ReparamRectangle rect = bounding_rectangle(spec, space);
  const CurvatureBounds cb = curvature_bounds(spec, merit, eta_star, rect.lambda_lo,
                                              rect.lambda_hi, std::max<std::size_t>(curve_samples, 101));
  return build_threshold(spec, merit, space, eta_star, side, choose_constants(cb, rect, margin),
                         curve_samples);
}

Decomposition decompose_increasing(const IncreasingAllocation& xhat, std::size_t n,
                                   const MeritRange& range) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "decomposition needs n >= 1");
  const double lo = range.lo, hi = range.hi;
  std::vector<double> points;
  for (std::size_t i = 1; i <= n; ++i) {
    points.push_back(i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  }
  if (xhat.kind() == IncreasingAllocation::Kind::kStep) {
    for (const auto& [eta, x] : xhat.knots()) {
      (void)x;
      if (eta > lo && eta <= hi) points.push_back(eta);
    }
  }
  std::sort(points.begin(), points.end());
  const double merge = 1e-12 * std::max(1.0, std::abs(hi - lo));
  points.erase(std::unique(points.begin(), points.end(),
                           [&](double a, double b) { return std::abs(a - b) <= merge; }),
               points.end());

  Decomposition out;
  double prev = xhat.right_limit(lo);
  if (prev > 0.0) out.terms.push_back({prev, lo, Side::kLow});
  double prev_point = lo;
  for (double t : points) {
    const double r = xhat.right_limit(t);
    out.sup_error_bound = std::max(out.sup_error_bound, xhat.left_limit(t) - xhat.right_limit(prev_point));
    const double w = r - prev;
    // x_hat is right-continuous, so ties at a threshold allocate.
    if (w > 1e-15) out.terms.push_back({w, t, Side::kHigh});
    prev = r;
    prev_point = t;
  }
  return out;
}

MixtureMechanism build_mixture(const LinearUtilitySpec& spec, const MeritFunction& merit,
                               const TypeSpace& space, const IncreasingAllocation& xhat,
                               std::size_t n, double margin, std::size_t curve_samples) {
  const Decomposition d = decompose_increasing(xhat, n, merit_range(merit, space));
  std::vector<MixtureComponent> comps;
  comps.reserve(d.terms.size());
  for (const auto& term : d.terms) {
    comps.push_back({term.weight, build_certified_threshold(spec, merit, space, term.eta_star,
                                                            term.side, margin, curve_samples)});
  }
  return MixtureMechanism(std::move(comps), xhat, d.sup_error_bound);
}

Mechanism as_mechanism(const LinearUtilitySpec& spec, ThresholdMechanism m) {
  return Mechanism(spec, std::move(m), true);
}

Mechanism as_mechanism(const LinearUtilitySpec& spec, MixtureMechanism m) {
  return Mechanism(spec, std::move(m), true);
}

Mechanism build_conditional(const LinearUtilitySpec& spec, const MeritFunction& merit,
                            const IncreasingAllocation& xhat, Instrument instrument,
                            const Grid& grid) {
  return Mechanism(spec,
                   ConditionalMechanism(spec, merit, xhat, instrument, grid.space().beta_lo()),
                   true);
}

Mechanism build_knife_edge_ordeal(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                  const TypeSpace& space, double q_star) {
  if (!(q_star > 0.0)) throw Error(ErrorCode::kInvalidArgument, "q_star must be positive");
  const MeritRange range = merit_range(merit, space);
  for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double level = range.lo + frac * (range.hi - range.lo);
    const KnifeEdgeResult k = knife_edge_diagnostic(spec, merit, space, level, 201);
    if (!(k.dispersion <= 1e-8)) {
      throw Error(ErrorCode::kNotKnifeEdge,
                  "beta/z(alpha) varies along the iso-merit curve at eta = " +
                      std::to_string(level) + " (dispersion " + std::to_string(k.dispersion) +
                      ")");
    }
  }
  return Mechanism(spec, PostedOrdealMechanism(spec, q_star), true);
}

Mechanism build_one_step_ordeal(const NonlinearUtilitySpec& spec, const TypeSpace& space,
                                const Type& anchor, double x_b) {
  if (!space.contains(anchor)) {
    throw Error(ErrorCode::kInvalidArgument, "anchor must lie inside the type space");
  }
  if (!(x_b > 0.0 && x_b <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "x_b must be in (0,1]");
  const double target = spec.v(anchor.beta, x_b);
  auto g = [&](double q) { return spec.z(anchor.alpha, q) - target; };
  if (g(spec.q_bar) < 0.0) {
    throw Error(ErrorCode::kOrdealCapExceeded,
                "indifference ordeal for x_b = " + std::to_string(x_b) + " exceeds q_bar = " +
                    std::to_string(spec.q_bar));
  }
  const double q_b = detail::solve_bracketed(g, 0.0, spec.q_bar);
  return Mechanism(spec, OneStepOrdealMechanism(spec, anchor, x_b, q_b), false, spec.q_bar);
}

Mechanism build_payment_screen(const LinearUtilitySpec& spec, const TypeSpace& space,
                               double center, double width) {
  const ReparamRectangle rect = bounding_rectangle(spec, space);
  return Mechanism(spec, PaymentScreenMechanism(spec, center, width, rect.kappa_lo), false);
}

}  // namespace mechlab
