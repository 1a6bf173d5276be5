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

#include "mechlab/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mechlab/construct.hpp"
#include "mechlab/contour.hpp"
#include "mechlab/error.hpp"

namespace mechlab {

using std::numbers::pi;

double angle(double slope) {
  if (std::isinf(slope)) return pi / 2.0;
  return slope >= 0.0 ? std::atan(slope) : std::atan(slope) + pi;
}

double line_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

IsoSlope iso_slope(const NonlinearUtilitySpec& spec, const Type& t, double x, double q) {
  const double s = (spec.v_x(t.beta, x) / spec.z_q(t.alpha, q)) *
                   (spec.z_alpha_q(t.alpha, q) / spec.v_beta_x(t.beta, x));
  return {s, SlopeKind::kMRS};
}

IsoSlope iso_slope(const NonlinearUtilitySpec& spec, const Type& t, const JumpData& j) {
  if (j.x_plus == j.x || j.q_plus == j.q) {
    throw Error(ErrorCode::kDegenerateJump, "jump needs x+ != x and q+ != q");
  }
  const double dv = spec.v(t.beta, j.x_plus) - spec.v(t.beta, j.x);
  const double dz = spec.z(t.alpha, j.q_plus) - spec.z(t.alpha, j.q);
  const double dza = spec.z_alpha(t.alpha, j.q_plus) - spec.z_alpha(t.alpha, j.q);
  const double dvb = spec.v_beta(t.beta, j.x_plus) - spec.v_beta(t.beta, j.x);
  return {(dv / dz) * (dza / dvb), SlopeKind::kDiff};
}

double payment_slope(const NonlinearUtilitySpec& spec, const Type& t, double x, double p) {
  return (spec.v_x(t.beta, x) / spec.w_p(t.alpha, p)) *
         (spec.w_alpha_p(t.alpha, p) / spec.v_beta_x(t.beta, x));
}

SlopeBound slope_bound_M(const NonlinearUtilitySpec& spec, const TypeSpace& space, double q_bar,
                         std::size_t n_samples) {
  if (!(q_bar > 0.0)) throw Error(ErrorCode::kInvalidArgument, "slope bound needs q_bar > 0");
  if (n_samples < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 samples per axis");
  SlopeBound b;
  b.raw = -std::numeric_limits<double>::infinity();
  const double xs[] = {0.0, 0.25, 0.5, 0.75};
  const double qs[] = {0.0, 0.5 * q_bar};
  const double fr[] = {0.5, 1.0};
  auto consider = [&](double s, const Type& t) {
    ++b.n_slopes;
    if (s > b.raw) {
      b.raw = s;
      b.argmax = t;
    }
  };
  const double den = static_cast<double>(n_samples - 1);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t j = 0; j < n_samples; ++j) {
      const Type t{space.alpha_lo() + (space.alpha_hi() - space.alpha_lo()) * i / den,
                   space.beta_lo() + (space.beta_hi() - space.beta_lo()) * j / den};
      for (double x : xs) {
        for (double q : qs) {
          consider(iso_slope(spec, t, x, q).slope, t);
          for (double fx : fr) {
            for (double fq : fr) {
              const JumpData jd{x, x + (1.0 - x) * fx, q, q + (q_bar - q) * fq};
              consider(iso_slope(spec, t, jd).slope, t);
            }
          }
        }
      }
    }
  }
  b.m = (1.0 - b.safety) * b.raw;
  return b;
}

PaymentBound payment_lower_bound(const MeritFunction& merit, const Grid& grid) {
  PaymentBound pb;
  pb.value = std::numeric_limits<double>::infinity();
  for (const Type& t : grid.nodes()) {
    const double v = std::abs(pi / 2.0 - angle(merit.iso_slope(t)));
    if (v < pb.value) {
      pb.value = v;
      pb.argmin = t;
    }
  }
  return pb;
}

AllocationField::AllocationField(Grid grid, std::vector<double> x,
                                 std::function<double(const Type&)> exact,
                                 std::vector<JumpCurve> jumps)
    : grid_(std::move(grid)), x_(std::move(x)), exact_(std::move(exact)), jumps_(std::move(jumps)) {
  if (x_.size() != grid_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "field values do not match the grid");
  }
  for (const auto& jc : jumps_) {
    if (jc.points.size() != jc.slopes.size()) {
      throw Error(ErrorCode::kInvalidArgument, "jump curve needs one slope per point");
    }
  }
  const auto [mn, mx] = std::minmax_element(x_.begin(), x_.end());
  range_ = *mx - *mn;
}

namespace {

// Interior points of the traced curve f = level with slope(point) at each.
JumpCurve traced_jump(const LevelFunction& f, double level, const TypeSpace& space,
                      const std::function<double(const Type&)>& slope) {
  const Contour c = trace_level_set(f, level, space, space.diameter() / 1000.0);
  JumpCurve jc;
  // Theta is open: the traced endpoints sit on its boundary.
  for (std::size_t k = 1; k + 1 < c.points.size(); ++k) {
    jc.points.push_back(c.points[k]);
    jc.slopes.push_back(slope(c.points[k]));
  }
  return jc;
}

void add_iso_merit_jumps(const MeritFunction& merit, const std::vector<double>& levels,
                         const TypeSpace& space, std::vector<JumpCurve>& out) {
  for (double level : levels) {
    out.push_back(traced_jump(merit_level_function(merit), level, space,
                              [&merit](const Type& t) { return merit.iso_slope(t); }));
  }
}

}  // namespace

AllocationField AllocationField::from_mechanism(const Mechanism& mech, const Grid& grid) {
  std::vector<double> x;
  for (const Bundle& b : mech.sample(grid)) x.push_back(b.x);
  if (!mech.closed_form()) return AllocationField(grid, std::move(x));
  const TypeSpace& space = grid.space();
  std::vector<JumpCurve> jumps;
  // Merit thresholds jump across iso-merit curves.
  if (const auto* th = mech.get<ThresholdMechanism>()) {
    add_iso_merit_jumps(th->merit(), {th->eta_star()}, space, jumps);
  }
  if (const auto* mix = mech.get<MixtureMechanism>()) {
    for (const auto& c : mix->components()) {
      add_iso_merit_jumps(c.mechanism.merit(), {c.mechanism.eta_star()}, space, jumps);
    }
  }
  if (const auto* cm = mech.get<ConditionalMechanism>()) {
    const IncreasingAllocation& xh = cm->xhat();
    if (xh.kind() == IncreasingAllocation::Kind::kStep) {
      std::vector<double> levels;
      for (const auto& [eta, v] : xh.knots()) {
        if (xh.left_limit(eta) < v) levels.push_back(eta);
      }
      add_iso_merit_jumps(cm->merit(), levels, space, jumps);
    }
  }
  if (const auto* po = mech.get<PostedOrdealMechanism>()) {
    const LinearUtilitySpec spec = std::get<LinearUtilitySpec>(mech.utility());
    const double qs = po->q_star();
    LevelFunction r{[spec, qs](const Type& t) { return t.beta - qs * spec.z.value(t.alpha); },
                    [spec, qs](const Type& t) { return std::pair{-qs * spec.z.d1(t.alpha), 1.0}; }};
    jumps.push_back(traced_jump(r, 0.0, space,
                                [spec, qs](const Type& t) { return qs * spec.z.d1(t.alpha); }));
  }
  if (const auto* os = mech.get<OneStepOrdealMechanism>()) {
    const NonlinearUtilitySpec& s = os->spec();
    const double xb = os->x_b(), qb = os->q_b();
    LevelFunction g{[os](const Type& t) { return os->take_margin(t); },
                    [&s, xb, qb](const Type& t) {
                      return std::pair{-s.z_alpha(t.alpha, qb), s.v_beta(t.beta, xb)};
                    }};
    jumps.push_back(traced_jump(g, 0.0, space, [&s, xb, qb](const Type& t) {
      return iso_slope(s, t, JumpData{0.0, xb, 0.0, qb}).slope;
    }));
  }
  const Mechanism* m = &mech;
  return AllocationField(grid, std::move(x), [m](const Type& t) { return m->allocation_at(t); },
                         std::move(jumps));
}

double AllocationField::value(const Type& t) const {
  if (exact_) return exact_(t);
  const double fa = (t.alpha - grid_.alpha(0)) / grid_.alpha_step();
  const double fb = (t.beta - grid_.beta(0)) / grid_.beta_step();
  const double ma = static_cast<double>(grid_.n_alpha() - 1);
  const double mb = static_cast<double>(grid_.n_beta() - 1);
  const double ca = std::clamp(fa, 0.0, ma), cb = std::clamp(fb, 0.0, mb);
  const std::size_t i = std::min(static_cast<std::size_t>(ca), grid_.n_alpha() - 2);
  const std::size_t j = std::min(static_cast<std::size_t>(cb), grid_.n_beta() - 2);
  const double u = ca - static_cast<double>(i), v = cb - static_cast<double>(j);
  auto at = [&](std::size_t a, std::size_t b) { return x_[grid_.index(a, b)]; };
  return (1 - u) * (1 - v) * at(i, j) + u * (1 - v) * at(i + 1, j) + (1 - u) * v * at(i, j + 1) +
         u * v * at(i + 1, j + 1);
}

double AllocationField::probe_step() const {
  const double s = std::min(grid_.alpha_step(), grid_.beta_step());
  return exact_ ? 1e-3 * s : s;
}

std::pair<double, double> AllocationField::gradient(std::size_t i, std::size_t j) const {
  auto at = [&](std::size_t a, std::size_t b) { return x_[grid_.index(a, b)]; };
  auto diff = [](double lo, double hi, double h) { return (hi - lo) / h; };
  const std::size_t na = grid_.n_alpha(), nb = grid_.n_beta();
  const std::size_t i0 = i > 0 ? i - 1 : i, i1 = i + 1 < na ? i + 1 : i;
  const std::size_t j0 = j > 0 ? j - 1 : j, j1 = j + 1 < nb ? j + 1 : j;
  return {diff(at(i0, j), at(i1, j), static_cast<double>(i1 - i0) * grid_.alpha_step()),
          diff(at(i, j0), at(i, j1), static_cast<double>(j1 - j0) * grid_.beta_step())};
}

std::vector<std::pair<double, double>> AllocationField::gradient_field() const {
  std::vector<std::pair<double, double>> g;
  g.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.n_alpha(); ++i) {
    for (std::size_t j = 0; j < grid_.n_beta(); ++j) g.push_back(gradient(i, j));
  }
  return g;
}

namespace {

// Slope of the nearest jump curve when t lies within tol of one.
std::optional<double> jump_slope_near(const AllocationField& field, const Type& t, double tol) {
  double best = tol;
  std::optional<double> slope;
  for (const auto& jc : field.jumps()) {
    for (std::size_t k = 0; k + 1 < jc.points.size(); ++k) {
      const Type& a = jc.points[k];
      const Type& b = jc.points[k + 1];
      const double da = b.alpha - a.alpha, db = b.beta - a.beta;
      const double len2 = da * da + db * db;
      double u = len2 > 0.0 ? ((t.alpha - a.alpha) * da + (t.beta - a.beta) * db) / len2 : 0.0;
      u = std::clamp(u, 0.0, 1.0);
      const double d = std::hypot(t.alpha - a.alpha - u * da, t.beta - a.beta - u * db);
      if (d <= best) {
        best = d;
        slope = u < 0.5 ? jc.slopes[k] : jc.slopes[k + 1];
      }
    }
  }
  return slope;
}

}  // namespace

double local_violation(const AllocationField& field, const MeritFunction& merit, std::size_t i,
                       std::size_t j, double tau) {
  const Grid& grid = field.grid();
  if (i == 0 || j == 0 || i + 1 >= grid.n_alpha() || j + 1 >= grid.n_beta()) {
    throw Error(ErrorCode::kInvalidArgument, "local violation needs an interior node");
  }
  const Type t = grid.node(i, j);
  const double h = field.probe_step();
  const double iso = angle(merit.iso_slope(t));
  // Differences straddling a discontinuity say nothing; on a jump curve the
  // only direction of constancy is its tangent.
  if (const auto s = jump_slope_near(field, t, 2.0 * h)) return line_distance(angle(*s), iso);
  const double x0 = field.value(t);
  const double threshold = tau * field.range() / grid.space().diameter();

  std::vector<double> candidates;
  for (int k = 0; k < 180; ++k) candidates.push_back(k * pi / 180.0);
  candidates.push_back(iso);
  std::pair<double, double> g;
  if (field.has_exact()) {
    g = {(field.value({t.alpha + h, t.beta}) - field.value({t.alpha - h, t.beta})) / (2 * h),
         (field.value({t.alpha, t.beta + h}) - field.value({t.alpha, t.beta - h})) / (2 * h)};
  } else {
    g = field.gradient(i, j);
  }
  if (g.first != 0.0 || g.second != 0.0) {
    // Perpendicular to the gradient: (-g_beta, g_alpha).
    candidates.push_back(angle(g.second == 0.0 ? std::numeric_limits<double>::infinity()
                                               : -g.first / g.second));
  }

  double best = std::numeric_limits<double>::infinity();
  for (double phi : candidates) {
    const double da = std::cos(phi), db = std::sin(phi);
    const double fwd = (field.value({t.alpha + h * da, t.beta + h * db}) - x0) / h;
    const double bwd = (field.value({t.alpha - h * da, t.beta - h * db}) - x0) / h;
    if (std::max(std::abs(fwd), std::abs(bwd)) <= threshold) {
      best = std::min(best, line_distance(phi, iso));
    }
  }
  return best;
}

ViolationReport global_violation(const AllocationField& field, const MeritFunction& merit,
                                 double tau) {
  const Grid& grid = field.grid();
  ViolationReport r;
  r.resolution = pi / 180.0;
  r.local.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  r.global = -1.0;
  for (std::size_t i = 1; i + 1 < grid.n_alpha(); ++i) {
    for (std::size_t j = 1; j + 1 < grid.n_beta(); ++j) {
      const double l = local_violation(field, merit, i, j, tau);
      r.local[grid.index(i, j)] = l;
      ++r.n_interior;
      if (l > r.global) {
        r.global = l;
        r.witness = grid.node(i, j);
        r.witness_on_jump = false;
      }
    }
  }
  for (const auto& jc : field.jumps()) {
    for (std::size_t k = 0; k < jc.points.size(); ++k) {
      const double l = line_distance(angle(jc.slopes[k]), angle(merit.iso_slope(jc.points[k])));
      ++r.n_jump_points;
      if (l > r.global) {
        r.global = l;
        r.witness = jc.points[k];
        r.witness_on_jump = true;
      }
    }
  }
  r.global = std::max(r.global, 0.0);
  return r;
}

ComparisonReport compare_instruments(const NonlinearUtilitySpec& spec, const MeritFunction& merit,
                                     const Grid& grid, const Type& anchor, double x_b,
                                     double tau) {
  ComparisonReport c;
  c.bound = slope_bound_M(spec, grid.space(), spec.q_bar);
  for (const Type& t : grid.nodes()) {
    const double s = merit.iso_slope(t);
    if (!(s > c.bound.m)) {
      throw Error(ErrorCode::kNotApplicable,
                  "iso-merit slope " + std::to_string(s) + " at (" + std::to_string(t.alpha) +
                      ", " + std::to_string(t.beta) + ") is not flatter than M = " +
                      std::to_string(c.bound.m));
    }
  }
  const Mechanism mech = build_one_step_ordeal(spec, grid.space(), anchor, x_b);
  c.q_b = mech.get<OneStepOrdealMechanism>()->q_b();
  c.violations = global_violation(AllocationField::from_mechanism(mech, grid), merit, tau);
  c.ordeal_violation = c.violations.global;
  c.payment_bound = payment_lower_bound(merit, grid);
  c.verdict = c.ordeal_violation < c.payment_bound.value;
  return c;
}

}  // namespace mechlab
