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

#ifndef MECHLAB_SCENARIO_HPP_
#define MECHLAB_SCENARIO_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mechlab/model.hpp"

namespace mechlab {

enum class Side { kLow, kHigh };  // allocation at exactly the threshold: 0 or 1
enum class Instrument { kPayments, kOrdeals };

std::string_view side_name(Side side);
std::string_view instrument_name(Instrument instrument);

struct Tolerances {
  double ic = 1e-8;
  double ir = 1e-9;
  double equity = 1e-9;
  double tau = 1e-3;          // "locally constant" threshold for the violation metric
  double margin = 0.25;       // headroom on the convexity constant
  std::size_t curve_samples = 1001;
  std::size_t equity_bins = 20;
  std::size_t convexity_trials = 100000;
};

// Knot table for an increasing allocation x_hat(eta).  Empty knots mean
// "linear from 0 at the bottom of the merit range to 1 at the top".
struct AllocationSpec {
  enum class Kind { kLinear, kStep };
  Kind kind = Kind::kLinear;
  std::vector<std::pair<double, double>> knots;
};

struct MechanismSettings {
  enum class Kind { kThreshold, kMixture, kConditional, kKnifeEdge, kOneStep, kPaymentScreen };
  Kind kind = Kind::kMixture;
  std::optional<double> threshold;  // defaults to the middle of the merit range
  Side side = Side::kLow;
  AllocationSpec allocation;
  std::size_t components = 100;
  Instrument instrument = Instrument::kPayments;
  double knife_q = 3.0;
  std::optional<Type> anchor;  // defaults to the centre of the rectangle
  double x_b = 0.1;
  double screen_center = 1.0;  // payment screen: logistic in kappa
  double screen_width = 0.1;
  std::size_t probe_n_alpha = 6;
  std::size_t probe_n_beta = 6;
  std::size_t probe_classes = 5;
};

std::string_view mechanism_kind_name(MechanismSettings::Kind kind);

struct Scenario {
  TypeSpace space{0.0, 1.0, 1.0, 2.0};
  UtilityModel utility = LinearUtilitySpec{ScalarFamily::exponential(1.0, 1.0),
                                           ScalarFamily::exponential(1.0, -1.0)};
  MeritFunction merit = MeritFunction::weighted_sum(1.0, 1.0);
  std::optional<double> ordeal_cap;  // q_bar; for nonlinear specs it mirrors the spec
  std::size_t n_alpha = 41;
  std::size_t n_beta = 41;
  Tolerances tol;
  MechanismSettings mechanism;

  Grid grid() const { return make_grid(space, n_alpha, n_beta); }
  bool is_linear() const { return std::holds_alternative<LinearUtilitySpec>(utility); }
  const LinearUtilitySpec& linear() const;
  // The utility in separable nonlinear form (linear specs are embedded).
  NonlinearUtilitySpec nonlinear() const;
};

// Parses the sectioned key-value scenario format.  Overrides are applied on
// top of the file as "section.key=value" strings.  Parse failures throw
// Error(kParseError) naming the offending line; out-of-range family
// parameters throw Error(kMalformedScenario).
Scenario parse_scenario(std::string_view text,
                        const std::vector<std::string>& overrides = {});
Scenario load_scenario(const std::string& path,
                       const std::vector<std::string>& overrides = {});

struct ValidationCheck {
  std::string name;
  bool pass = true;
  std::string detail;
  std::optional<Type> witness;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  MeritRange merit_range;
  double min_eta_alpha = 0.0;
  double min_eta_beta = 0.0;

  bool all_pass() const;
  const ValidationCheck* find(std::string_view name) const;
};

ValidationReport validate_scenario(const Scenario& scenario);

}  // namespace mechlab

#endif  // MECHLAB_SCENARIO_HPP_
