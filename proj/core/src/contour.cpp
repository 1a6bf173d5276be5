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

#include "mechlab/contour.hpp"

#include <algorithm>
#include <cmath>

#include "mechlab/error.hpp"
#include "numeric.hpp"

namespace mechlab {

namespace {

constexpr double kCorrectorTol = 1e-10;

bool inside_closed(const TypeSpace& s, const Type& t) {
  return t.alpha >= s.alpha_lo() && t.alpha <= s.alpha_hi() && t.beta >= s.beta_lo() &&
         t.beta <= s.beta_hi();
}

// Newton iterations along the gradient onto the level set.
bool correct(const LevelFunction& f, double level, Type& p) {
  for (int it = 0; it < 60; ++it) {
    const double r = f.value(p) - level;
    if (std::abs(r) <= kCorrectorTol) return true;
    const auto [ga, gb] = f.gradient(p);
    const double g2 = ga * ga + gb * gb;
    if (!(g2 > 0.0)) return false;
    p.alpha -= r * ga / g2;
    p.beta -= r * gb / g2;
  }
  return std::abs(f.value(p) - level) <= kCorrectorTol;
}

}  // namespace

Contour trace_level_set(const LevelFunction& f, double level, const TypeSpace& s,
                        double step) {
  Contour out;
  const double a0 = s.alpha_lo(), a1 = s.alpha_hi(), b0 = s.beta_lo(), b1 = s.beta_hi();
  if (f.value({a0, b0}) > level || f.value({a1, b1}) < level) return out;

  auto solve_beta = [&](double a) {
    return detail::solve_bracketed([&](double b) { return f.value({a, b}) - level; }, b0, b1);
  };
  auto solve_alpha = [&](double b) {
    return detail::solve_bracketed([&](double a) { return f.value({a, b}) - level; }, a0, a1);
  };

  const Type start = f.value({a0, b1}) >= level ? Type{a0, solve_beta(a0)}
                                                : Type{solve_alpha(b1), b1};
  const Type end = f.value({a1, b0}) <= level ? Type{a1, solve_beta(a1)}
                                              : Type{solve_alpha(b0), b0};
  out.points.push_back(start);

  const double perimeter = 2.0 * ((a1 - a0) + (b1 - b0));
  const auto max_steps = static_cast<std::size_t>(4.0 * perimeter / step) + 16;
  Type p = start;
  for (std::size_t k = 0; k < max_steps; ++k) {
    if (std::hypot(end.alpha - p.alpha, end.beta - p.beta) <= step) break;
    const auto [ga, gb] = f.gradient(p);
    const double norm = std::hypot(ga, gb);
    Type next{p.alpha + step * gb / norm, p.beta - step * ga / norm};
    if (!correct(f, level, next)) {
      out.escaped = true;
      break;
    }
    if (!inside_closed(s, next)) {
      // Left through the expected exit edge unless we are still far from it.
      if (std::hypot(end.alpha - next.alpha, end.beta - next.beta) > 2.0 * step) {
        out.escaped = true;
      }
      break;
    }
    if (next.alpha <= p.alpha) {
      out.escaped = true;
      break;
    }
    out.points.push_back(next);
    p = next;
  }
  if (end.alpha > out.points.back().alpha || out.points.size() == 1) {
    out.points.push_back(end);
  }
  return out;
}

LevelFunction merit_level_function(const MeritFunction& merit) {
  return LevelFunction{
      [merit](const Type& t) { return merit.eta(t); },
      [merit](const Type& t) { return std::pair{merit.eta_alpha(t), merit.eta_beta(t)}; }};
}

Contour trace_iso_merit(const MeritFunction& merit, double level, const TypeSpace& space,
                        double step) {
  if (step <= 0.0) step = space.diameter() / 1000.0;
  return trace_level_set(merit_level_function(merit), level, space, step);
}

std::vector<Type> sample_contour(const Contour& c, std::size_t n) {
  std::vector<Type> out;
  if (c.points.empty() || n == 0) return out;
  if (n == 1 || c.points.size() == 1) return {c.points.front()};
  const std::size_t last = c.points.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = (k * last + (n - 1) / 2) / (n - 1);
    out.push_back(c.points[std::min(idx, last)]);
  }
  out.back() = c.points.back();
  out.front() = c.points.front();
  return out;
}

}  // namespace mechlab
