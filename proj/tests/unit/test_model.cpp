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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mechlab/error.hpp"
#include "mechlab/model.hpp"
#include "test_support.hpp"

namespace mechlab {
namespace {

using testing::for_all;
using testing::Gen;
using testing::s1_space;
using testing::s1_spec;

double central(auto f, double x, double h = 1e-5) { return (f(x + h) - f(x - h)) / (2 * h); }

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

TEST(EvalUtility, ZeroBundleIsZero) {
  EXPECT_EQ(eval_utility(s1_spec(), {0.0, 1.0}, {0.0, 0.0, 0.0}), 0.0);
}

TEST(EvalUtility, PlugInAtAlphaZero) {
  EXPECT_NEAR(eval_utility(s1_spec(), {0.0, 1.0}, {1.0, 0.5, 0.25}), 0.25, 1e-15);
}

TEST(EvalUtility, PlugInAtCorner) {
  // 2 - e - 1/e
  EXPECT_NEAR(eval_utility(s1_spec(), {1.0, 2.0}, {1.0, 1.0, 1.0}), -1.0861612696304874, 1e-12);
}

TEST(EvalUtility, LinearInBundle) {
  const auto spec = s1_spec();
  for_all(1000, 7, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    const Bundle a = g.bundle(), b = g.bundle();
    const double c = g.uniform(0.0, 1.0);
    const Bundle mix{c * a.x + (1 - c) * b.x, c * a.p + (1 - c) * b.p, c * a.q + (1 - c) * b.q};
    EXPECT_NEAR(eval_utility(spec, t, mix),
                c * eval_utility(spec, t, a) + (1 - c) * eval_utility(spec, t, b), 1e-12)
        << "case " << i;
  });
}

TEST(EvalUtility, NonlinearEmbeddingAgrees) {
  const auto spec = s1_spec();
  const auto nl = as_nonlinear(spec, 3.0);
  for_all(1000, 8, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    const Bundle b = g.bundle();
    EXPECT_NEAR(eval_utility(spec, t, b), eval_utility(nl, t, b), 1e-12) << "case " << i;
  });
}

TEST(Families, ScalarDerivativesMatchFiniteDifferences) {
  const ScalarFamily fams[] = {ScalarFamily::exponential(1.5, -0.7), ScalarFamily::power(2.0, 1.0, 1.5),
                               ScalarFamily::affine(1.0, 0.5)};
  for (const auto& f : fams) {
    for_all(10000, 11, [&](Gen& g, std::size_t i) {
      const double a = g.uniform(0.0, 1.0);
      ASSERT_TRUE(close_rel(f.d1(a), central([&](double s) { return f.value(s); }, a), 1e-6))
          << f.describe() << " case " << i;
      ASSERT_TRUE(close_rel(f.d2(a), central([&](double s) { return f.d1(s); }, a), 1e-6))
          << f.describe() << " case " << i;
    });
  }
}

TEST(Families, ShapesVanishAtZeroAndIncrease) {
  const ShapeFamily shapes[] = {ShapeFamily::identity(), ShapeFamily::log1p(2.0),
                                ShapeFamily::quadratic(0.5), ShapeFamily::expm1(0.3)};
  for (const auto& h : shapes) {
    EXPECT_EQ(h.value(0.0), 0.0) << h.describe();
    for_all(10000, 12, [&](Gen& g, std::size_t i) {
      const double s = g.uniform(0.0, 3.0);
      ASSERT_GT(h.d1(s), 0.0) << h.describe();
      ASSERT_TRUE(close_rel(h.d1(s), central([&](double u) { return h.value(u); }, s), 1e-6))
          << h.describe() << " case " << i;
    });
  }
}

TEST(Families, MeritPartialsMatchFiniteDifferences) {
  const MeritFunction ms[] = {MeritFunction::weighted_sum(1.0, 2.0), MeritFunction::product(1.3)};
  for (const auto& m : ms) {
    for_all(10000, 13, [&](Gen& g, std::size_t i) {
      const Type t = g.type_in(s1_space());
      auto along_a = [&](auto f) { return central([&](double a) { return f({a, t.beta}); }, t.alpha); };
      auto along_b = [&](auto f) { return central([&](double b) { return f({t.alpha, b}); }, t.beta); };
      auto eta = [&](Type u) { return m.eta(u); };
      auto ea = [&](Type u) { return m.eta_alpha(u); };
      auto eb = [&](Type u) { return m.eta_beta(u); };
      ASSERT_TRUE(close_rel(m.eta_alpha(t), along_a(eta), 1e-6)) << "case " << i;
      ASSERT_TRUE(close_rel(m.eta_beta(t), along_b(eta), 1e-6)) << "case " << i;
      ASSERT_TRUE(close_rel(m.eta_alpha_alpha(t), along_a(ea), 1e-6)) << "case " << i;
      ASSERT_TRUE(close_rel(m.eta_alpha_beta(t), along_b(ea), 1e-6)) << "case " << i;
      ASSERT_TRUE(close_rel(m.eta_beta_beta(t), along_b(eb), 1e-6)) << "case " << i;
    });
  }
}

TEST(Families, NonlinearPartialsMatchFiniteDifferences) {
  NonlinearUtilitySpec nl{ShapeFamily::log1p(1.0), ScalarFamily::exponential(1.0, 1.0),
                          ShapeFamily::quadratic(0.5), ScalarFamily::exponential(1.0, -1.0),
                          ShapeFamily::expm1(0.2), 4.0};
  for_all(2000, 14, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    const double x = g.uniform(0.05, 1.0), q = g.uniform(0.05, 4.0);
    EXPECT_TRUE(close_rel(nl.v_x(t.beta, x), central([&](double s) { return nl.v(t.beta, s); }, x), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.v_beta(t.beta, x), central([&](double b) { return nl.v(b, x); }, t.beta), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.v_beta_x(t.beta, x), central([&](double b) { return nl.v_x(b, x); }, t.beta), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.z_q(t.alpha, q), central([&](double s) { return nl.z(t.alpha, s); }, q), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.z_alpha(t.alpha, q), central([&](double a) { return nl.z(a, q); }, t.alpha), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.z_alpha_q(t.alpha, q), central([&](double a) { return nl.z_q(a, q); }, t.alpha), 1e-6)) << i;
    EXPECT_TRUE(close_rel(nl.w_alpha_p(t.alpha, q), central([&](double a) { return nl.w_p(a, q); }, t.alpha), 1e-6)) << i;
  });
}

TEST(Families, InvalidParametersAreMalformed) {
  EXPECT_THROW(ScalarFamily::exponential(-1.0, 1.0), Error);
  EXPECT_THROW(ShapeFamily::log1p(0.0), Error);
  try {
    ShapeFamily::quadratic(-1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedScenario);
  }
}

TEST(MeritRange, WeightedSumUsesCorners) {
  const MeritRange r = merit_range(testing::sum_merit(), s1_space());
  EXPECT_EQ(r.lo, 1.0);
  EXPECT_EQ(r.hi, 3.0);
  const MeritRange r2 = merit_range(MeritFunction::weighted_sum(0.3, 1.7), TypeSpace(-0.4, 0.9, 0.5, 1.25));
  EXPECT_EQ(r2.lo, 0.3 * -0.4 + 1.7 * 0.5);
  EXPECT_EQ(r2.hi, 0.3 * 0.9 + 1.7 * 1.25);
}

TEST(MeritRange, ProductMerit) {
  const MeritRange r = merit_range(testing::knife_merit(), s1_space());
  EXPECT_DOUBLE_EQ(r.lo, 1.0);
  EXPECT_DOUBLE_EQ(r.hi, 2.0 * std::numbers::e);
}

TEST(Merit, IsoSlope) {
  EXPECT_DOUBLE_EQ(testing::sum_merit().iso_slope({0.3, 1.2}), -1.0);
  EXPECT_DOUBLE_EQ(MeritFunction::weighted_sum(1.0, 2.0).iso_slope({0.3, 1.2}), -0.5);
  EXPECT_DOUBLE_EQ(testing::knife_merit().iso_slope({0.3, 1.2}), -1.2);
}

TEST(Grid, HalfStepInset) {
  const Grid g = make_grid(s1_space(), 3, 3);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g.alpha(0), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.alpha(1), 0.5);
  EXPECT_DOUBLE_EQ(g.alpha(2), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.beta(0), 1.0 + 1.0 / 6.0);
  EXPECT_EQ(g.index(2, 1), 7u);
  EXPECT_DOUBLE_EQ(g.node(7).alpha, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(g.node(7).beta, 1.5);
}

TEST(Grid, TwoByTwoCornerInset) {
  const Grid g = make_grid(s1_space(), 2, 2);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.alpha(0), 0.25);
  EXPECT_DOUBLE_EQ(g.alpha(1), 0.75);
  for (const Type& t : g.nodes()) EXPECT_TRUE(s1_space().contains(t));
}

TEST(Grid, SingleNodeAxisRejected) {
  try {
    make_grid(s1_space(), 1, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(TypeSpace, MalformedBounds) {
  EXPECT_THROW(TypeSpace(1.0, 0.0, 1.0, 2.0), Error);
  EXPECT_THROW(TypeSpace(0.0, 1.0, 2.0, 1.0), Error);
  EXPECT_FALSE(s1_space().contains({0.0, 1.5}));  // open set
  EXPECT_TRUE(s1_space().contains({0.5, 1.5}));
}

}  // namespace
}  // namespace mechlab
