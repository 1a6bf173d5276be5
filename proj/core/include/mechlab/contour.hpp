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

#ifndef MECHLAB_CONTOUR_HPP_
#define MECHLAB_CONTOUR_HPP_

#include <functional>
#include <utility>
#include <vector>

#include "mechlab/model.hpp"

namespace mechlab {

// A function increasing in both alpha and beta, with its gradient.
struct LevelFunction {
  std::function<double(const Type&)> value;
  std::function<std::pair<double, double>(const Type&)> gradient;
};

struct Contour {
  std::vector<Type> points;  // ordered by increasing alpha; ends lie on the boundary
  bool escaped = false;      // marching left the rectangle before the expected exit

  bool empty() const { return points.empty(); }
};

// Traces {F = level} across the closed rectangle by predictor-corrector
// marching: a tangent step of length `step` followed by Newton corrections
// along the gradient until |F - level| <= 1e-10.  Both boundary crossings
// are solved exactly and included as the first and last points.
Contour trace_level_set(const LevelFunction& f, double level, const TypeSpace& space,
                        double step);

LevelFunction merit_level_function(const MeritFunction& merit);

// Iso-merit curve; step defaults to diameter / 1000.
Contour trace_iso_merit(const MeritFunction& merit, double level, const TypeSpace& space,
                        double step = 0.0);

// n points spread evenly by index along the contour, ends included.
std::vector<Type> sample_contour(const Contour& c, std::size_t n);

}  // namespace mechlab

#endif  // MECHLAB_CONTOUR_HPP_
