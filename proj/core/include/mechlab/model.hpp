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

#ifndef MECHLAB_MODEL_HPP_
#define MECHLAB_MODEL_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mechlab {

// A type (alpha, beta): alpha is need for money, beta is need for the good.
struct Type {
  double alpha = 0.0;
  double beta = 0.0;
};

// What a mechanism hands to one type: allocation x, payment p, ordeal q.
struct Bundle {
  double x = 0.0;
  double p = 0.0;
  double q = 0.0;
};

// Open rectangle (alpha_lo, alpha_hi) x (beta_lo, beta_hi).
class TypeSpace {
 public:
  TypeSpace(double alpha_lo, double alpha_hi, double beta_lo, double beta_hi);

  double alpha_lo() const { return alpha_lo_; }
  double alpha_hi() const { return alpha_hi_; }
  double beta_lo() const { return beta_lo_; }
  double beta_hi() const { return beta_hi_; }
  double diameter() const;
  bool contains(const Type& t) const;  // open-set membership

 private:
  double alpha_lo_, alpha_hi_, beta_lo_, beta_hi_;
};

// Positive weight functions of alpha with closed-form derivatives.
//   exponential: a * exp(b * alpha)
//   power:       a * (alpha + c)^p   (defined for alpha > -c)
//   affine:      a + b * alpha
class ScalarFamily {
 public:
  enum class Kind { kExponential, kPower, kAffine };

  static ScalarFamily exponential(double a, double b);
  static ScalarFamily power(double a, double c, double p);
  static ScalarFamily affine(double a, double b);

  Kind kind() const { return kind_; }
  double value(double alpha) const;
  double d1(double alpha) const;
  double d2(double alpha) const;

  // Lower end of the open half-line the family is defined on, if any.
  std::optional<double> domain_lo() const;
  // True when the family is finite and positive on all of R.
  bool defined_on_reals() const { return kind_ == Kind::kExponential; }

  double param(std::size_t i) const { return params_.at(i); }
  std::string describe() const;

 private:
  ScalarFamily(Kind kind, std::vector<double> params);

  Kind kind_;
  std::vector<double> params_;
};

// Level-dependence h(s) of a separable term g(alpha) * h(s) (or beta * h(x)).
// Every shape satisfies h(0) = 0 and h'(s) > 0 on its admissible range.
//   identity:  s
//   log1p:     log(1 + c s) / c
//   quadratic: s + c s^2 / 2          (s >= 0)
//   expm1:     (exp(c s) - 1) / c
class ShapeFamily {
 public:
  enum class Kind { kIdentity, kLog1p, kQuadratic, kExpm1 };

  static ShapeFamily identity();
  static ShapeFamily log1p(double c);
  static ShapeFamily quadratic(double c);
  static ShapeFamily expm1(double c);

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double value(double s) const;
  double d1(double s) const;
  std::string describe() const;

 private:
  ShapeFamily(Kind kind, double c) : kind_(kind), c_(c) {}

  Kind kind_;
  double c_;
};

// U = beta x - w(alpha) p - z(alpha) q.
struct LinearUtilitySpec {
  ScalarFamily w;
  ScalarFamily z;
};

// U = v(beta, x) - w(alpha, p) - z(alpha, q) with the separable forms
//   v = beta * hv(x),  w = gw(alpha) * hw(p),  z = gz(alpha) * hz(q).
// q_bar caps the ordeal.
struct NonlinearUtilitySpec {
  ShapeFamily v_shape;
  ScalarFamily w_weight;
  ShapeFamily w_shape;
  ScalarFamily z_weight;
  ShapeFamily z_shape;
  double q_bar = 1.0;

  double v(double beta, double x) const;
  double v_x(double beta, double x) const;
  double v_beta(double beta, double x) const;
  double v_beta_x(double beta, double x) const;
  double w(double alpha, double p) const;
  double w_p(double alpha, double p) const;
  double w_alpha_p(double alpha, double p) const;
  double z(double alpha, double q) const;
  double z_q(double alpha, double q) const;
  double z_alpha(double alpha, double q) const;
  double z_alpha_q(double alpha, double q) const;
};

// Embeds a linear specification into the separable nonlinear form.
NonlinearUtilitySpec as_nonlinear(const LinearUtilitySpec& spec, double q_bar);

using UtilityModel = std::variant<LinearUtilitySpec, NonlinearUtilitySpec>;

// Merit eta(alpha, beta), defined on all of R^2.
//   weighted_sum: a * alpha + b * beta
//   product:      beta * exp(c * alpha)
class MeritFunction {
 public:
  enum class Kind { kWeightedSum, kProduct };

  static MeritFunction weighted_sum(double a, double b);
  static MeritFunction product(double c);

  Kind kind() const { return kind_; }
  double param(std::size_t i) const { return params_.at(i); }

  double eta(const Type& t) const;
  double eta_alpha(const Type& t) const;
  double eta_beta(const Type& t) const;
  double eta_alpha_alpha(const Type& t) const;
  double eta_alpha_beta(const Type& t) const;
  double eta_beta_beta(const Type& t) const;

  // Slope d(beta)/d(alpha) of the iso-merit curve through t.
  double iso_slope(const Type& t) const { return -eta_alpha(t) / eta_beta(t); }

  std::string describe() const;

 private:
  MeritFunction(Kind kind, std::vector<double> params);

  Kind kind_;
  std::vector<double> params_;
};

struct MeritRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Infimum and supremum of eta over the closure of the rectangle, taken over
// the corners and a dense sample of the edges.
MeritRange merit_range(const MeritFunction& merit, const TypeSpace& space);

// Uniform grid inset half a step from the boundary of the open rectangle.
// Node (i, j) has index i * n_beta + j (alpha-major).
class Grid {
 public:
  Grid(const TypeSpace& space, std::size_t n_alpha, std::size_t n_beta);

  const TypeSpace& space() const { return space_; }
  std::size_t n_alpha() const { return n_alpha_; }
  std::size_t n_beta() const { return n_beta_; }
  std::size_t size() const { return n_alpha_ * n_beta_; }

  double alpha(std::size_t i) const;
  double beta(std::size_t j) const;
  double alpha_step() const;
  double beta_step() const;
  Type node(std::size_t index) const;
  Type node(std::size_t i, std::size_t j) const { return {alpha(i), beta(j)}; }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_beta_ + j; }

  std::vector<Type> nodes() const;

  friend bool operator==(const Grid& a, const Grid& b);

 private:
  TypeSpace space_;
  std::size_t n_alpha_;
  std::size_t n_beta_;
};

Grid make_grid(const TypeSpace& space, std::size_t n_alpha, std::size_t n_beta);

double eval_utility(const LinearUtilitySpec& spec, const Type& t, const Bundle& b);
double eval_utility(const NonlinearUtilitySpec& spec, const Type& t, const Bundle& b);
double eval_utility(const UtilityModel& model, const Type& t, const Bundle& b);

}  // namespace mechlab

#endif  // MECHLAB_MODEL_HPP_
