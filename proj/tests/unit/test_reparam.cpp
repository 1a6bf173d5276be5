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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mechlab/error.hpp"
#include "mechlab/reparam.hpp"
#include "test_support.hpp"

namespace mechlab {
namespace {

using std::numbers::e;
using testing::for_all;
using testing::Gen;
using testing::s1_space;
using testing::s1_spec;
using testing::sum_merit;

// Independent S1 oracle: with u = -lambda, kappa*(u) = (eta* + ln(u)/2) sqrt(u).
double oracle_kappa(double eta_star, double lambda) {
  const double u = -lambda;
  return (eta_star + 0.5 * std::log(u)) * std::sqrt(u);
}

TEST(ToKL, Examples) {
  const KL a = to_kl(s1_spec(), {0.0, 1.0});
  EXPECT_DOUBLE_EQ(a.kappa, 1.0);
  EXPECT_DOUBLE_EQ(a.lambda, -1.0);
  const KL b = to_kl(s1_spec(), {1.0, 2.0});
  EXPECT_NEAR(b.kappa, 0.7357588823428847, 1e-15);
  EXPECT_NEAR(b.lambda, -0.1353352832366127, 1e-15);
}

TEST(ToKL, RoundTrip) {
  const auto spec = s1_spec();
  for_all(1000, 21, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    EXPECT_NEAR(alpha_of_lambda(spec, to_kl(spec, t).lambda), t.alpha, 1e-10) << i;
  });
}

TEST(ToKL, RoundTripByBracketingFamilies) {
  const LinearUtilitySpec spec{ScalarFamily::affine(1.0, 0.5), ScalarFamily::power(1.0, 1.0, -2.0)};
  for_all(500, 22, [&](Gen& g, std::size_t i) {
    const double a = g.uniform(0.0, 1.0);
    EXPECT_NEAR(alpha_of_lambda(spec, lambda_of_alpha(spec, a)), a, 1e-10) << i;
  });
}

TEST(AlphaOfLambda, Examples) {
  EXPECT_NEAR(alpha_of_lambda(s1_spec(), -1.0), 0.0, 1e-15);
  EXPECT_NEAR(alpha_of_lambda(s1_spec(), -std::exp(-2.0)), 1.0, 1e-12);
  try {
    alpha_of_lambda(s1_spec(), 0.5);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kOutOfImage);
  }
}

TEST(MeritKL, Examples) {
  EXPECT_NEAR(merit_kl(s1_spec(), sum_merit(), {0.7, -1.0}), 0.7, 1e-14);
  EXPECT_NEAR(merit_kl(s1_spec(), sum_merit(), {1.0 / e, -std::exp(-2.0)}), 2.0, 1e-12);
}

TEST(MeritKL, ComposesWithToKL) {
  const auto spec = s1_spec();
  const MeritFunction merits[] = {sum_merit(), testing::knife_merit(), MeritFunction::weighted_sum(2, 0.5)};
  for (const auto& m : merits) {
    for_all(1000, 23, [&](Gen& g, std::size_t i) {
      const Type t = g.type_in(s1_space());
      EXPECT_NEAR(merit_kl(spec, m, to_kl(spec, t)), m.eta(t), 1e-10) << i;
    });
  }
}

TEST(KappaStar, Examples) {
  EXPECT_NEAR(kappa_star(s1_spec(), sum_merit(), 2.0, -1.0), 2.0, 1e-12);
  EXPECT_NEAR(kappa_star(s1_spec(), sum_merit(), 2.0, -std::exp(-2.0)), 1.0 / e, 1e-12);
}

TEST(KappaStar, MatchesClosedForm) {
  for_all(1000, 24, [&](Gen& g, std::size_t i) {
    const double es = g.uniform(1.0, 3.0), l = g.uniform(-1.0, -0.14);
    EXPECT_NEAR(kappa_star(s1_spec(), sum_merit(), es, l), oracle_kappa(es, l), 1e-10) << i;
  });
}

TEST(KappaStar, IncreasingInThreshold) {
  for_all(500, 25, [&](Gen& g, std::size_t i) {
    const double a = g.uniform(1.0, 3.0), b = g.uniform(1.0, 3.0), l = g.uniform(-1.0, -0.14);
    if (a == b) return;
    EXPECT_EQ(a < b, kappa_star(s1_spec(), sum_merit(), a, l) < kappa_star(s1_spec(), sum_merit(), b, l)) << i;
  });
}

TEST(KappaStar, AnalyticDerivativesMatchOracle) {
  // Frozen from symbolic differentiation of the closed form at lambda = -1/2, eta* = 2.
  const KappaStar k = kappa_star_derivs(s1_spec(), sum_merit(), 2.0, -0.5);
  EXPECT_NEAR(k.value, 1.1691490265059583, 1e-10);
  EXPECT_NEAR(k.d1, -1.8762558076925058, 1e-9);
  EXPECT_NEAR(k.d2, -1.1691490265059583, 1e-9);
}

TEST(CurvatureBounds, S1Oracle) {
  // max |kappa*'| = e and max |kappa*''| = e^3 / 4 at lambda_hi = -e^-2.
  const double lo = -1.0, hi = -std::exp(-2.0);
  for (auto src : {DerivativeSource::kAnalytic, DerivativeSource::kFiniteDifference}) {
    const CurvatureBounds b = curvature_bounds(s1_spec(), sum_merit(), 2.0, lo, hi, 1001, src);
    EXPECT_NEAR(b.max_abs_d1, 2.718281828459045, 1e-5);
    EXPECT_NEAR(b.max_abs_d2, 5.021384230796917, 1e-4);
    EXPECT_NEAR(b.m1, 3.3978522855738065, 1e-5);
    EXPECT_NEAR(b.m2, 6.276730288496146, 1e-4);
    EXPECT_NEAR(b.argmax_d1, hi, 1e-9);
  }
}

TEST(CurvatureBounds, AffineWeightsGiveStraightCurve) {
  // w = 1 and z = 2 - alpha make lambda affine in alpha, so kappa* = eta* - 2 - lambda.
  const LinearUtilitySpec spec{ScalarFamily::affine(1.0, 0.0), ScalarFamily::affine(2.0, -1.0)};
  const CurvatureBounds b = curvature_bounds(spec, sum_merit(), 2.0, -2.0, -1.0, 201);
  EXPECT_NEAR(b.max_abs_d2, 0.0, 1e-9);
  EXPECT_NEAR(b.max_abs_d1, 1.0, 1e-9);
  EXPECT_NEAR(b.m1, kCurvatureSafety, 1e-9);
}

TEST(CurvatureBounds, TooFewSamples) {
  EXPECT_THROW(curvature_bounds(s1_spec(), sum_merit(), 2.0, -1.0, -0.2, 50), Error);
}

TEST(BoundingRectangle, S1) {
  const ReparamRectangle r = bounding_rectangle(s1_spec(), s1_space());
  EXPECT_NEAR(r.kappa_lo, 1.0 / e, 1e-8);
  EXPECT_NEAR(r.kappa_hi, 2.0, 1e-8);
  EXPECT_NEAR(r.lambda_lo, -1.0, 1e-8);
  EXPECT_NEAR(r.lambda_hi, -std::exp(-2.0), 1e-8);
  EXPECT_LT(r.lambda_hi, 0.0);
  for (const Type& t : make_grid(s1_space(), 41, 41).nodes()) EXPECT_TRUE(r.contains(to_kl(s1_spec(), t)));
}

TEST(BoundingRectangle, NearPointSpace) {
  const TypeSpace tiny(0.5, 0.5 + 1e-9, 1.5, 1.5 + 1e-9);
  const ReparamRectangle r = bounding_rectangle(s1_spec(), tiny);
  EXPECT_LT(r.kappa_hi - r.kappa_lo, 1e-7);
  EXPECT_LT(r.lambda_span(), 1e-7);
}

TEST(Reparam, Injective) {
  const auto spec = s1_spec();
  for_all(10000, 26, [&](Gen& g, std::size_t i) {
    const Type a = g.type_in(s1_space()), b = g.type_in(s1_space());
    const KL ka = to_kl(spec, a), kb = to_kl(spec, b);
    if (a.alpha != b.alpha || a.beta != b.beta) {
      ASSERT_GT(std::hypot(ka.kappa - kb.kappa, ka.lambda - kb.lambda), 0.0) << i;
    }
  });
}

TEST(Reparam, LambdaIncreasingInAlpha) {
  std::vector<double> a(1000);
  Gen g(27);
  for (double& v : a) v = g.uniform(0.0, 1.0);
  std::sort(a.begin(), a.end());
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i] > a[i - 1]) {
      EXPECT_LT(lambda_of_alpha(s1_spec(), a[i - 1]), lambda_of_alpha(s1_spec(), a[i]));
    }
  }
}

TEST(Reparam, UtilityEquivalenceUpToScaling) {
  const auto spec = s1_spec();
  for_all(2000, 28, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    const Bundle b1 = g.bundle(), b2 = g.bundle();
    const KL kl = to_kl(spec, t);
    const double du = eval_utility(spec, t, b1) - eval_utility(spec, t, b2);
    const double dr = (kl.kappa * b1.x + kl.lambda * b1.q - b1.p) - (kl.kappa * b2.x + kl.lambda * b2.q - b2.p);
    EXPECT_NEAR(du, spec.w.value(t.alpha) * dr, 1e-12) << i;
  });
}

TEST(ThresholdCurve, InterpolationStaysOnLevelSet) {
  const double lo = -1.0, hi = -std::exp(-2.0);
  const ThresholdCurve c(s1_spec(), sum_merit(), 2.0, lo, hi, 1001);
  for_all(1000, 29, [&](Gen& g, std::size_t i) {
    const double l = g.uniform(lo, hi);
    EXPECT_NEAR(merit_kl(s1_spec(), sum_merit(), {c(l), l}), 2.0, 1e-8) << i;
  });
}

}  // namespace
}  // namespace mechlab
