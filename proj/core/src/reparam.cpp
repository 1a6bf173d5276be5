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

#include "mechlab/reparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mechlab/error.hpp"
#include "numeric.hpp"

namespace mechlab {

KL to_kl(const LinearUtilitySpec& spec, const Type& t) {
  const double w = spec.w.value(t.alpha);
  return {t.beta / w, -spec.z.value(t.alpha) / w};
}

double lambda_of_alpha(const LinearUtilitySpec& spec, double alpha) {
  return -spec.z.value(alpha) / spec.w.value(alpha);
}

double alpha_of_lambda(const LinearUtilitySpec& spec, double lambda) {
  if (!(lambda < 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kOutOfImage, "lambda must be finite and negative");
  }
  using K = ScalarFamily::Kind;
  if (spec.w.kind() == K::kExponential && spec.z.kind() == K::kExponential) {
    // -(a_z/a_w) exp((b_z - b_w) alpha) = lambda
    const double rate = spec.z.param(1) - spec.w.param(1);
    if (rate != 0.0) {
      return std::log(-lambda * spec.w.param(0) / spec.z.param(0)) / rate;
    }
  }
  auto g = [&](double a) { return lambda_of_alpha(spec, a) - lambda; };
  std::optional<double> floor = spec.w.domain_lo();
  if (const auto zf = spec.z.domain_lo()) floor = floor ? std::max(*floor, *zf) : *zf;
  const double x0 = floor ? *floor + 1.0 : 0.0;
  const auto bracket = detail::expand_bracket(g, x0, 1.0, floor, 120);
  if (!bracket) {
    throw Error(ErrorCode::kOutOfImage, "lambda is outside the image of -z/w");
  }
  return detail::solve_bracketed(g, bracket->first, bracket->second);
}

InverseDerivs alpha_of_lambda_derivs(const LinearUtilitySpec& spec, double lambda) {
  const double a = alpha_of_lambda(spec, lambda);
  const double w = spec.w.value(a), w1 = spec.w.d1(a), w2 = spec.w.d2(a);
  const double z = spec.z.value(a), z1 = spec.z.d1(a), z2 = spec.z.d2(a);
  // lambda(alpha) = -z/w
  const double l1 = (z * w1 - z1 * w) / (w * w);
  const double l2 = ((z * w2 - z2 * w) * w - 2.0 * w1 * (z * w1 - z1 * w)) / (w * w * w);
  return {a, 1.0 / l1, -l2 / (l1 * l1 * l1)};
}

double merit_kl(const LinearUtilitySpec& spec, const MeritFunction& merit, const KL& p) {
  const double a = alpha_of_lambda(spec, p.lambda);
  return merit.eta({a, p.kappa * spec.w.value(a)});
}

double kappa_star(const LinearUtilitySpec& spec, const MeritFunction& merit,
                  double eta_star, double lambda) {
  const double a = alpha_of_lambda(spec, lambda);
  const double w = spec.w.value(a);
  // kappa enters only through beta = kappa * w; solve in beta and rescale.
  auto g = [&](double beta) { return merit.eta({a, beta}) - eta_star; };
  const auto bracket = detail::expand_bracket(g, 0.0, 1.0, std::nullopt, 1100);
  if (!bracket) {
    throw Error(ErrorCode::kNoConvergence,
                "merit is not increasing in beta; cannot locate the threshold curve");
  }
  const double beta = detail::solve_bracketed(g, bracket->first, bracket->second);
  const double kappa = beta / w;
  if (!(std::abs(merit_kl(spec, merit, {kappa, lambda}) - eta_star) <= 1e-10)) {
    // Rescaling by w can cost a few ulps; polish directly in kappa.
    auto h = [&](double k) { return merit.eta({a, k * w}) - eta_star; };
    const double span = std::max(std::abs(kappa), 1.0) * 1e-9;
    const double refined = detail::solve_bracketed(h, kappa - span, kappa + span);
    if (!(std::abs(h(refined)) <= 1e-10)) {
      throw Error(ErrorCode::kNoConvergence, "threshold solve missed tolerance");
    }
    return refined;
  }
  return kappa;
}

KappaStar kappa_star_derivs(const LinearUtilitySpec& spec, const MeritFunction& merit,
                            double eta_star, double lambda) {
  const double k = kappa_star(spec, merit, eta_star, lambda);
  const InverseDerivs f = alpha_of_lambda_derivs(spec, lambda);
  const double a = f.alpha;
  // W(lambda) = w(f(lambda)).
  const double W = spec.w.value(a);
  const double W1 = spec.w.d1(a) * f.d1;
  const double W2 = spec.w.d2(a) * f.d1 * f.d1 + spec.w.d1(a) * f.d2;
  const Type t{a, k * W};
  const double ea = merit.eta_alpha(t), eb = merit.eta_beta(t);
  const double eaa = merit.eta_alpha_alpha(t), eab = merit.eta_alpha_beta(t);
  const double ebb = merit.eta_beta_beta(t);

  // Partials of eta~(kappa, lambda) = eta(f(lambda), kappa W(lambda)).
  const double ek = eb * W;
  const double el = ea * f.d1 + eb * k * W1;
  const double ekk = ebb * W * W;
  const double ekl = (eab * f.d1 + ebb * k * W1) * W + eb * W1;
  const double ell = eaa * f.d1 * f.d1 + 2.0 * eab * f.d1 * k * W1 + ebb * k * k * W1 * W1 +
                     ea * f.d2 + eb * k * W2;

  const double d1 = -el / ek;
  const double d2 = -(ell + 2.0 * ekl * d1 + ekk * d1 * d1) / ek;
  return {k, d1, d2};
}

// ------------------------------------------------------------ ThresholdCurve

ThresholdCurve::ThresholdCurve(const LinearUtilitySpec& spec, const MeritFunction& merit,
                               double eta_star, double lambda_lo, double lambda_hi,
                               std::size_t n_samples)
    : eta_star_(eta_star) {
  if (n_samples < 2 || !(lambda_lo < lambda_hi) || !(lambda_hi < 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad threshold curve sampling range");
  }
  lambda_.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double l = i + 1 == n_samples ? lambda_hi : lambda_lo + s * (lambda_hi - lambda_lo);
    const KappaStar ks = kappa_star_derivs(spec, merit, eta_star, l);
    lambda_.push_back(l);
    kappa_.push_back(ks.value);
    d1_.push_back(ks.d1);
    d2_.push_back(ks.d2);
  }
}

double ThresholdCurve::operator()(double lambda) const {
  if (lambda <= lambda_.front()) return kappa_.front();
  if (lambda >= lambda_.back()) return kappa_.back();
  const auto it = std::upper_bound(lambda_.begin(), lambda_.end(), lambda);
  const std::size_t i = static_cast<std::size_t>(it - lambda_.begin()) - 1;
  const double h = lambda_[i + 1] - lambda_[i];
  const double s = (lambda - lambda_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * kappa_[i] + h10 * h * d1_[i] + h01 * kappa_[i + 1] + h11 * h * d1_[i + 1];
}

// ---------------------------------------------------------- curvature bounds

CurvatureBounds curvature_bounds(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                 double eta_star, double lambda_lo, double lambda_hi,
                                 std::size_t n_samples, DerivativeSource source) {
  if (n_samples < 101) {
    throw Error(ErrorCode::kInvalidArgument, "curvature bounds need >= 101 samples");
  }
  CurvatureBounds cb;
  const double h = (lambda_hi - lambda_lo) / 1e4;
  auto ks = [&](double l) { return kappa_star(spec, merit, eta_star, l); };
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double l = i + 1 == n_samples ? lambda_hi : lambda_lo + s * (lambda_hi - lambda_lo);
    double d1 = 0.0, d2 = 0.0;
    if (source == DerivativeSource::kAnalytic) {
      const KappaStar k = kappa_star_derivs(spec, merit, eta_star, l);
      d1 = k.d1;
      d2 = k.d2;
    } else if (i == 0) {
      const double f0 = ks(l), f1 = ks(l + h), f2 = ks(l + 2 * h), f3 = ks(l + 3 * h);
      d1 = (-3 * f0 + 4 * f1 - f2) / (2 * h);
      d2 = (2 * f0 - 5 * f1 + 4 * f2 - f3) / (h * h);
    } else if (i + 1 == n_samples) {
      const double f0 = ks(l), f1 = ks(l - h), f2 = ks(l - 2 * h), f3 = ks(l - 3 * h);
      d1 = (3 * f0 - 4 * f1 + f2) / (2 * h);
      d2 = (2 * f0 - 5 * f1 + 4 * f2 - f3) / (h * h);
    } else {
      const double fm = ks(l - h), f0 = ks(l), fp = ks(l + h);
      d1 = (fp - fm) / (2 * h);
      d2 = (fp - 2 * f0 + fm) / (h * h);
    }
    if (std::abs(d1) > cb.max_abs_d1) {
      cb.max_abs_d1 = std::abs(d1);
      cb.argmax_d1 = l;
    }
    if (std::abs(d2) > cb.max_abs_d2) {
      cb.max_abs_d2 = std::abs(d2);
      cb.argmax_d2 = l;
    }
  }
  cb.m1 = kCurvatureSafety * cb.max_abs_d1;
  cb.m2 = kCurvatureSafety * cb.max_abs_d2;
  return cb;
}

ReparamRectangle bounding_rectangle(const LinearUtilitySpec& spec, const TypeSpace& space) {
  constexpr int kEdge = 1000;
  constexpr double kPad = 1e-9;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ReparamRectangle r{kInf, -kInf, kInf, -kInf};
  auto visit = [&](double a, double b) {
    const KL p = to_kl(spec, {a, b});
    r.kappa_lo = std::min(r.kappa_lo, p.kappa);
    r.kappa_hi = std::max(r.kappa_hi, p.kappa);
    r.lambda_lo = std::min(r.lambda_lo, p.lambda);
    r.lambda_hi = std::max(r.lambda_hi, p.lambda);
  };
  for (int k = 0; k <= kEdge; ++k) {
    const double s = static_cast<double>(k) / kEdge;
    const double a = space.alpha_lo() + s * (space.alpha_hi() - space.alpha_lo());
    const double b = space.beta_lo() + s * (space.beta_hi() - space.beta_lo());
    visit(a, space.beta_lo());
    visit(a, space.beta_hi());
    visit(space.alpha_lo(), b);
    visit(space.alpha_hi(), b);
  }
  r.kappa_lo -= kPad;
  r.kappa_hi += kPad;
  r.lambda_lo -= kPad;
  r.lambda_hi = std::min(r.lambda_hi + kPad, r.lambda_hi * 0.5);
  return r;
}

}  // namespace mechlab
