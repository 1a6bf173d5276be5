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

#ifndef MECHLAB_REPARAM_HPP_
#define MECHLAB_REPARAM_HPP_

#include <cstddef>
#include <vector>

#include "mechlab/model.hpp"

namespace mechlab {

// Reparametrized type: kappa = beta / w(alpha), lambda = -z(alpha) / w(alpha).
// Dividing linear utility by w(alpha) > 0 gives kappa x + lambda q - p.
struct KL {
  double kappa = 0.0;
  double lambda = 0.0;
};

struct ReparamRectangle {
  double kappa_lo = 0.0;
  double kappa_hi = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;

  double lambda_span() const { return lambda_hi - lambda_lo; }
  bool contains(const KL& p) const {
    return p.kappa >= kappa_lo && p.kappa <= kappa_hi && p.lambda >= lambda_lo &&
           p.lambda <= lambda_hi;
  }
};

KL to_kl(const LinearUtilitySpec& spec, const Type& t);
double lambda_of_alpha(const LinearUtilitySpec& spec, double alpha);

// Inverse of alpha -> -z(alpha)/w(alpha).  Closed form for exponential/exponential
// specs, bracketed root finding otherwise.  Throws kOutOfImage if lambda is
// not negative or the bracket cannot be found.
double alpha_of_lambda(const LinearUtilitySpec& spec, double lambda);

// First and second derivative of alpha_of_lambda.
struct InverseDerivs {
  double alpha = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
InverseDerivs alpha_of_lambda_derivs(const LinearUtilitySpec& spec, double lambda);

// Merit in (kappa, lambda) coordinates: eta(f(lambda), kappa * w(f(lambda))).
double merit_kl(const LinearUtilitySpec& spec, const MeritFunction& merit, const KL& p);

// The kappa at which (kappa, lambda) has merit eta_star.  Solved numerically
// with bracket expansion; |merit_kl - eta_star| <= 1e-10 on return.
double kappa_star(const LinearUtilitySpec& spec, const MeritFunction& merit,
                  double eta_star, double lambda);

struct KappaStar {
  double value = 0.0;
  double d1 = 0.0;  // d kappa* / d lambda
  double d2 = 0.0;
};

// kappa* with derivatives from implicit differentiation of
// merit_kl(kappa*(lambda), lambda) = eta_star.
KappaStar kappa_star_derivs(const LinearUtilitySpec& spec, const MeritFunction& merit,
                            double eta_star, double lambda);

// kappa*(lambda) tabulated over [lambda_lo, lambda_hi] and interpolated with
// cubic Hermite segments using the tabulated slopes.
class ThresholdCurve {
 public:
  ThresholdCurve(const LinearUtilitySpec& spec, const MeritFunction& merit,
                 double eta_star, double lambda_lo, double lambda_hi,
                 std::size_t n_samples);

  double eta_star() const { return eta_star_; }
  std::size_t size() const { return lambda_.size(); }
  const std::vector<double>& lambda() const { return lambda_; }
  const std::vector<double>& kappa() const { return kappa_; }
  const std::vector<double>& d1() const { return d1_; }
  const std::vector<double>& d2() const { return d2_; }

  // Interpolated kappa*(lambda); clamps to the tabulated range.
  double operator()(double lambda) const;

 private:
  double eta_star_;
  std::vector<double> lambda_, kappa_, d1_, d2_;
};

enum class DerivativeSource { kAnalytic, kFiniteDifference };

struct CurvatureBounds {
  double m1 = 0.0;  // safety * max |kappa*'|
  double m2 = 0.0;  // safety * max |kappa*''|
  double max_abs_d1 = 0.0;
  double max_abs_d2 = 0.0;
  double argmax_d1 = 0.0;  // lambda attaining max_abs_d1
  double argmax_d2 = 0.0;
};

inline constexpr double kCurvatureSafety = 1.25;

// Needs n_samples >= 101.  Finite differences use step (hi - lo) / 1e4,
// one-sided at the two ends.
CurvatureBounds curvature_bounds(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                 double eta_star, double lambda_lo, double lambda_hi,
                                 std::size_t n_samples,
                                 DerivativeSource source = DerivativeSource::kAnalytic);

// Hull of the (kappa, lambda) image of the rectangle's boundary, padded by 1e-9.
ReparamRectangle bounding_rectangle(const LinearUtilitySpec& spec, const TypeSpace& space);

}  // namespace mechlab

#endif  // MECHLAB_REPARAM_HPP_
