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

#include "mechlab/construct.hpp"
#include "mechlab/error.hpp"
#include "mechlab/verify.hpp"
#include "test_support.hpp"

namespace mechlab {
namespace {

using testing::for_all;
using testing::Gen;
using testing::s1_space;
using testing::s1_spec;
using testing::sum_merit;

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kSolverFailure;
}

IncreasingAllocation random_allocation(Gen& g, const MeritRange& r) {
  std::vector<double> xs(4);
  for (double& x : xs) x = g.uniform(0.0, 1.0);
  std::sort(xs.begin(), xs.end());
  const auto kind = g.index(2) == 0 ? IncreasingAllocation::Kind::kLinear : IncreasingAllocation::Kind::kStep;
  std::vector<std::pair<double, double>> knots;
  for (std::size_t k = 0; k < xs.size(); ++k) knots.emplace_back(r.lo + (r.hi - r.lo) * k / 3.0, xs[k]);
  return IncreasingAllocation(kind, knots);
}

TEST(ChooseConstants, Examples) {
  CurvatureBounds b;
  b.m1 = 1.0;
  b.m2 = 2.0;
  const ReparamRectangle r{0.0, 1.0, -1.0, -0.5};
  const ThresholdConstants c = choose_constants(b, r, 0.25);
  EXPECT_DOUBLE_EQ(c.zeta, 2.5);
  EXPECT_DOUBLE_EQ(c.psi, 3.25);
  b.m2 = 0.0;
  EXPECT_DOUBLE_EQ(choose_constants(b, r, 0.25).zeta, 1.25e-6);
  b.m1 = std::nan("");
  EXPECT_EQ(error_of([&] { choose_constants(b, r, 0.25); }), ErrorCode::kInvalidArgument);
}

TEST(ChooseConstants, S1Oracle) {
  const auto m = build_certified_threshold(s1_spec(), sum_merit(), s1_space(), 2.0, Side::kHigh);
  EXPECT_NEAR(m.constants().zeta, 7.8459129, 1e-5);
  EXPECT_NEAR(m.constants().psi, 11.1819363, 1e-5);
}

TEST(ChooseConstants, DominatesCurvatureProperty) {
  for_all(50, 51, [&](Gen& g, std::size_t i) {
    CurvatureBounds b;
    b.m1 = g.uniform(0.0, 10.0);
    b.m2 = g.uniform(0.0, 10.0);
    const double lo = g.uniform(-3.0, -1.0);
    const ReparamRectangle r{0.0, 1.0, lo, lo + g.uniform(0.1, 0.9)};
    const ThresholdConstants c = choose_constants(b, r, g.uniform(0.01, 1.0));
    EXPECT_GT(c.zeta, b.m2) << i;
    EXPECT_GE(c.psi, b.m1 + c.zeta * r.lambda_span()) << i;
  });
}

TEST(BuildThreshold, RejectsOutOfRange) {
  EXPECT_EQ(error_of([] {
              build_certified_threshold(s1_spec(), sum_merit(), s1_space(), 3.5, Side::kLow);
            }),
            ErrorCode::kBadThreshold);
  EXPECT_NO_THROW(build_certified_threshold(s1_spec(), sum_merit(), s1_space(), 3.0, Side::kHigh));
}

TEST(Decompose, Constant) {
  const Decomposition d = decompose_increasing(IncreasingAllocation::constant(0.4, 1.0, 3.0), 10, {1.0, 3.0});
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_DOUBLE_EQ(d.terms[0].weight, 0.4);
  EXPECT_DOUBLE_EQ(d.terms[0].eta_star, 1.0);
  EXPECT_EQ(d.terms[0].side, Side::kLow);
  EXPECT_DOUBLE_EQ(d.sup_error_bound, 0.0);
}

TEST(Decompose, SingleThreshold) {
  const Decomposition d = decompose_increasing(IncreasingAllocation::threshold(2.0, 1.0, 3.0), 1, {1.0, 3.0});
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_DOUBLE_EQ(d.terms[0].weight, 1.0);
  EXPECT_DOUBLE_EQ(d.terms[0].eta_star, 2.0);
  EXPECT_EQ(d.terms[0].side, Side::kHigh);
  EXPECT_DOUBLE_EQ(d.sup_error_bound, 0.0);
}

TEST(Decompose, LinearQuarterSteps) {
  const Decomposition d = decompose_increasing(IncreasingAllocation::linear(1.0, 3.0), 4, {1.0, 3.0});
  ASSERT_EQ(d.terms.size(), 4u);
  const double at[] = {1.5, 2.0, 2.5, 3.0};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(d.terms[k].weight, 0.25, 1e-15);
    EXPECT_DOUBLE_EQ(d.terms[k].eta_star, at[k]);
  }
  EXPECT_NEAR(d.sup_error_bound, 0.25, 1e-15);
  EXPECT_THROW(decompose_increasing(IncreasingAllocation::linear(1.0, 3.0), 0, {1.0, 3.0}), Error);
}

TEST(Decompose, WeightsSumToTopValueAndBoundHolds) {
  const MeritRange r{1.0, 3.0};
  for_all(200, 52, [&](Gen& g, std::size_t i) {
    const IncreasingAllocation x = random_allocation(g, r);
    const std::size_t n = 1 + g.index(40);
    const Decomposition d = decompose_increasing(x, n, r);
    double total = 0.0;
    for (const auto& t : d.terms) {
      EXPECT_GT(t.weight, 0.0) << i;
      total += t.weight;
    }
    EXPECT_NEAR(total, x(r.hi), 1e-12) << i;
    for (int s = 0; s <= 200; ++s) {
      const double eta = r.lo + (r.hi - r.lo) * s / 200.0;
      double y = 0.0;
      for (const auto& t : d.terms) {
        const bool base = eta == r.lo && t.eta_star == r.lo;
        if (t.side == Side::kLow ? (eta > t.eta_star || base) : eta >= t.eta_star) {
          y += t.weight;
        }
      }
      EXPECT_LE(std::abs(y - x(eta)), d.sup_error_bound + 1e-12) << i << " eta " << eta;
    }
  });
}

TEST(BuildMixture, SingleThresholdMatchesThreshold) {
  const auto mix = build_mixture(s1_spec(), sum_merit(), s1_space(), IncreasingAllocation::threshold(2.0, 1.0, 3.0), 1);
  const auto th = build_certified_threshold(s1_spec(), sum_merit(), s1_space(), 2.0, Side::kHigh);
  ASSERT_EQ(mix.components().size(), 1u);
  for_all(200, 53, [&](Gen& g, std::size_t i) {
    const Type t = g.type_in(s1_space());
    const Bundle a = mix.bundle(t), b = th.bundle(t);
    EXPECT_DOUBLE_EQ(a.x, b.x) << i;
    EXPECT_NEAR(a.p, b.p, 1e-12) << i;
    EXPECT_NEAR(a.q, b.q, 1e-12) << i;
  });
}

TEST(BuildMixture, ZeroTargetGivesEmptyMixture) {
  const auto mix = build_mixture(s1_spec(), sum_merit(), s1_space(), IncreasingAllocation::constant(0.0, 1.0, 3.0), 20);
  EXPECT_TRUE(mix.components().empty());
  const Bundle b = mix.bundle({0.3, 1.7});
  EXPECT_EQ(b.x, 0.0);
  EXPECT_EQ(b.p, 0.0);
  EXPECT_EQ(b.q, 0.0);
}

TEST(BuildMixture, LinearHundredWithinOnePercent) {
  const auto mix = build_mixture(s1_spec(), sum_merit(), s1_space(), IncreasingAllocation::linear(1.0, 3.0), 100);
  EXPECT_LE(mix.sup_error_bound(), 0.01 + 1e-12);
  const Grid g = make_grid(s1_space(), 101, 101);
  double worst = 0.0;
  for (const Type& t : g.nodes()) {
    worst = std::max(worst, std::abs(mix.allocation(t) - (sum_merit().eta(t) - 1.0) / 2.0));
  }
  EXPECT_LE(worst, mix.sup_error_bound() + 1e-12);
}

TEST(BuildMixture, RandomTargetsIncentiveCompatible) {
  const Grid grid = make_grid(s1_space(), 9, 9);
  for_all(6, 54, [&](Gen& g, std::size_t i) {
    const auto x = random_allocation(g, {1.0, 3.0});
    const Mechanism m = as_mechanism(s1_spec(), build_mixture(s1_spec(), sum_merit(), s1_space(), x, 8, 0.25, 401));
    EXPECT_TRUE(check_ic(m, grid).pass) << i;
    EXPECT_TRUE(check_ir(m, grid).pass) << i;
    for (const Bundle& b : m.sample(grid)) EXPECT_GE(b.q, 0.0) << i;
  });
}

TEST(BuildConditional, StepTransferAtHalfAlpha) {
  const Grid grid = make_grid(s1_space(), 5, 5);
  const Mechanism m = build_conditional(s1_spec(), sum_merit(), IncreasingAllocation::threshold(2.0, 1.0, 3.0),
                                        Instrument::kPayments, grid);
  EXPECT_EQ(m.kind_name(), "conditional");
  for (double beta : {1.55, 1.7, 1.99}) {
    EXPECT_NEAR(m.at({0.5, beta}).p * std::exp(0.5), 1.5, 1e-12) << beta;
  }
  EXPECT_EQ(m.at({0.5, 1.45}).p, 0.0);
}

TEST(BuildKnifeEdge, RejectsNonKnifeMerit) {
  EXPECT_EQ(error_of([] { build_knife_edge_ordeal(s1_spec(), sum_merit(), s1_space(), 2.0); }),
            ErrorCode::kNotKnifeEdge);
}

TEST(BuildKnifeEdge, PostedOrdealSplitsOnMerit) {
  const auto m = build_knife_edge_ordeal(s1_spec(), testing::knife_merit(), s1_space(), 3.0);
  EXPECT_EQ(m.at({0.0, 1.5}).x, 0.0);
  EXPECT_EQ(m.at({1.0, 2.0}).x, 1.0);
  EXPECT_EQ(m.at({1.0, 2.0}).q, 3.0);
  const auto none = build_knife_edge_ordeal(s1_spec(), testing::knife_merit(), s1_space(), 10.0);
  for (const Type& t : make_grid(s1_space(), 11, 11).nodes()) EXPECT_EQ(none.at(t).x, 0.0);
}

NonlinearUtilitySpec s1_nonlinear(double q_bar) { return as_nonlinear(s1_spec(), q_bar); }

TEST(BuildOneStep, IndifferenceOrdeal) {
  const auto m = build_one_step_ordeal(s1_nonlinear(5.0), s1_space(), {0.5, 1.5}, 0.1);
  const auto* os = m.get<OneStepOrdealMechanism>();
  ASSERT_NE(os, nullptr);
  EXPECT_NEAR(os->q_b(), 0.247308191, 1e-9);
  EXPECT_NEAR(os->take_margin({0.5, 1.5}), 0.0, 1e-12);
  EXPECT_EQ(m.at({0.5, 1.5}).x, 0.1);
  EXPECT_EQ(m.ordeal_cap(), 5.0);
}

TEST(BuildOneStep, CapExceededAndBadArguments) {
  EXPECT_EQ(error_of([] { build_one_step_ordeal(s1_nonlinear(0.2), s1_space(), {0.5, 1.5}, 0.1); }),
            ErrorCode::kOrdealCapExceeded);
  EXPECT_EQ(error_of([] { build_one_step_ordeal(s1_nonlinear(5.0), s1_space(), {1.0, 1.5}, 0.1); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([] { build_one_step_ordeal(s1_nonlinear(5.0), s1_space(), {0.5, 1.5}, 0.0); }),
            ErrorCode::kInvalidArgument);
}

TEST(BuildOneStep, IncentiveCompatibleOnGrid) {
  const auto m = build_one_step_ordeal(s1_nonlinear(5.0), s1_space(), {0.5, 1.5}, 0.1);
  const Grid grid = make_grid(s1_space(), 41, 41);
  EXPECT_TRUE(check_ic(m, grid).pass);
  EXPECT_TRUE(check_ir(m, grid).pass);
}

TEST(BuildPaymentScreen, UsesLowestKappa) {
  const auto m = build_payment_screen(s1_spec(), s1_space(), 1.0, 0.2);
  const Grid grid = make_grid(s1_space(), 21, 21);
  EXPECT_TRUE(check_ic(m, grid).pass);
  const IRReport ir = check_ir(m, grid);
  EXPECT_TRUE(ir.pass);
  // Nodes are cell centres, so the zero-rent corner is half a cell away.
  EXPECT_GE(ir.min_utility, 0.0);
  EXPECT_LT(ir.min_utility, 0.01);
}

}  // namespace
}  // namespace mechlab
