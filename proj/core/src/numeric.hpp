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

#ifndef MECHLAB_SRC_NUMERIC_HPP_
#define MECHLAB_SRC_NUMERIC_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace mechlab::detail {

// Root of a continuous function known to change sign on [lo, hi].
template <typename F>
double solve_bracketed(F f, double lo, double hi, std::uintmax_t max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = max_iter;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  const double fa = f(a);
  const double fb = f(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

// Expands [x0 - step, x0 + step] geometrically until an increasing function
// crosses zero.  Optional lower limit keeps the bracket inside a domain.
template <typename F>
std::optional<std::pair<double, double>> expand_bracket(F f, double x0, double step,
                                                        std::optional<double> floor,
                                                        int max_doublings = 200) {
  double lo = x0 - step;
  double hi = x0 + step;
  auto clamp_lo = [&](double v) {
    if (floor && v <= *floor) return *floor + (x0 - *floor) * 1e-12;
    return v;
  };
  lo = clamp_lo(lo);
  for (int k = 0; k < max_doublings; ++k) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi)) return std::nullopt;
    if (flo <= 0.0 && fhi >= 0.0) return std::pair{lo, hi};
    step *= 2.0;
    if (flo > 0.0) {
      lo = floor ? (*floor + (lo - *floor) * 0.5) : x0 - step;
      if (floor && lo - *floor < 1e-300) return std::nullopt;
    }
    if (fhi < 0.0) hi = x0 + step;
  }
  return std::nullopt;
}

}  // namespace mechlab::detail

#endif  // MECHLAB_SRC_NUMERIC_HPP_
