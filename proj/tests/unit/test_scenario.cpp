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

#include <string>

#include <gtest/gtest.h>

#include "mechlab/error.hpp"
#include "mechlab/scenario.hpp"
#include "test_support.hpp"

namespace mechlab {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ParseScenario, EmptyTextIsS1) {
  const Scenario sc = parse_scenario("");
  ASSERT_TRUE(sc.is_linear());
  EXPECT_DOUBLE_EQ(sc.linear().w.value(1.0), std::exp(1.0));
  EXPECT_DOUBLE_EQ(sc.linear().z.value(1.0), std::exp(-1.0));
  EXPECT_EQ(sc.space.beta_hi(), 2.0);
  EXPECT_EQ(sc.n_alpha, 41u);
  EXPECT_EQ(sc.mechanism.kind, MechanismSettings::Kind::kMixture);
}

TEST(ParseScenario, SectionsAndComments) {
  const Scenario sc = parse_scenario(R"(
# comment
[domain]
alpha_lo = -1
alpha_hi = 2   # trailing comment
[merit]
eta = product 0.5
[grid]
n_alpha = 7
[mechanism]
kind = threshold
threshold = 2.5
side = high
allocation = step
knots = 1:0 2:0.5 3:1
anchor = 0.1 1.2
)");
  EXPECT_EQ(sc.space.alpha_lo(), -1.0);
  EXPECT_EQ(sc.space.alpha_hi(), 2.0);
  EXPECT_EQ(sc.merit.kind(), MeritFunction::Kind::kProduct);
  EXPECT_EQ(sc.n_alpha, 7u);
  EXPECT_EQ(sc.mechanism.side, Side::kHigh);
  ASSERT_TRUE(sc.mechanism.threshold);
  EXPECT_EQ(*sc.mechanism.threshold, 2.5);
  ASSERT_EQ(sc.mechanism.allocation.knots.size(), 3u);
  EXPECT_EQ(sc.mechanism.allocation.knots[1].second, 0.5);
  ASSERT_TRUE(sc.mechanism.anchor);
  EXPECT_EQ(sc.mechanism.anchor->beta, 1.2);
}

TEST(ParseScenario, OverridesWin) {
  const Scenario sc = parse_scenario("[grid]\nn_alpha = 7\n", {"grid.n_alpha=9", "merit.eta=weighted_sum 1 2"});
  EXPECT_EQ(sc.n_alpha, 9u);
  EXPECT_DOUBLE_EQ(sc.merit.iso_slope({0.5, 1.5}), -0.5);
}

TEST(ParseScenario, ErrorsNameTheLine) {
  try {
    parse_scenario("[grid]\nn_alpha = 7\nbogus = 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  try {
    parse_scenario("", {"grid.n_alpha=x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("override 1"), std::string::npos) << e.what();
  }
}

TEST(ParseScenario, MalformedValues) {
  EXPECT_EQ(code_of([] { parse_scenario("[domain]\nalpha_lo = 2\n"); }), ErrorCode::kMalformedScenario);
  EXPECT_EQ(code_of([] { parse_scenario("[utility]\nw = exponential -1 1\n"); }),
            ErrorCode::kMalformedScenario);
  EXPECT_EQ(code_of([] { parse_scenario("[utility]\nkind = nonlinear\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_scenario("[grid]\nn_beta = 1\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_scenario("[nowhere]\n"); }), ErrorCode::kParseError);
}

TEST(ParseScenario, NonlinearWithCap) {
  const Scenario sc = parse_scenario(
      "[utility]\nkind = nonlinear\nv_shape = log1p 1\nz_shape = quadratic 0.5\nq_bar = 4\n");
  ASSERT_FALSE(sc.is_linear());
  EXPECT_EQ(sc.nonlinear().q_bar, 4.0);
  EXPECT_EQ(sc.nonlinear().v_shape.kind(), ShapeFamily::Kind::kLog1p);
}

TEST(LoadScenario, RepositoryScenariosParse) {
  for (const char* name : {"s1_canonical.ini", "s1_threshold.ini", "s1_conditional.ini", "knife_edge.ini",
                           "fairness_flat_merit.ini", "fairness_steep_merit.ini", "payment_screen.ini",
                           "nonlinear_concave.ini"}) {
    EXPECT_NO_THROW(load_scenario(testing::scenario_path(name))) << name;
  }
  EXPECT_THROW(load_scenario(testing::scenario_path("missing.ini")), Error);
}

TEST(ValidateScenario, S1AllPass) {
  const ValidationReport r = validate_scenario(parse_scenario(""));
  EXPECT_TRUE(r.all_pass());
  EXPECT_EQ(r.merit_range.lo, 1.0);
  EXPECT_EQ(r.merit_range.hi, 3.0);
}

TEST(ValidateScenario, IncreasingOrdealCostFails) {
  const ValidationReport r = validate_scenario(parse_scenario("[utility]\nz = exponential 1 1\n"));
  const ValidationCheck* c = r.find("z'<0");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_TRUE(c->witness.has_value());
  EXPECT_FALSE(r.all_pass());
}

TEST(ValidateScenario, DecreasingMeritFails) {
  const ValidationReport r = validate_scenario(parse_scenario("[merit]\neta = weighted_sum 1 -1\n"));
  const ValidationCheck* c = r.find("eta_beta>0");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->pass);
  EXPECT_TRUE(r.find("eta_alpha>0")->pass);
}

TEST(ValidateScenario, NonlinearChecks) {
  const ValidationReport r =
      validate_scenario(load_scenario(testing::scenario_path("nonlinear_concave.ini")));
  EXPECT_TRUE(r.all_pass());
  EXPECT_NE(r.find("z_alpha_q<0"), nullptr);
}

TEST(ValidateScenario, PowerFamilyOutsideDomainIsMalformed) {
  // (alpha - 0.5)^2 is undefined for alpha <= 0.5.
  const Scenario sc = parse_scenario("[utility]\nw = power 1 -0.5 2\n");
  EXPECT_EQ(code_of([&] { validate_scenario(sc); }), ErrorCode::kMalformedScenario);
}

}  // namespace
}  // namespace mechlab
