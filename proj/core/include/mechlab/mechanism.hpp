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

#ifndef MECHLAB_MECHANISM_HPP_
#define MECHLAB_MECHANISM_HPP_

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mechlab/model.hpp"
#include "mechlab/reparam.hpp"
#include "mechlab/scenario.hpp"

namespace mechlab {

// Weakly increasing x_hat: merit -> [0, 1] given by a knot table.  Linear
// tables interpolate; step tables are right-continuous (value of the last
// knot at or below eta).  Both clamp outside the knot range.
class IncreasingAllocation {
 public:
  enum class Kind { kLinear, kStep };

  // Throws kNotMonotone for decreasing values, kInvalidArgument for values
  // outside [0, 1] or knots not strictly increasing in eta.
  IncreasingAllocation(Kind kind, std::vector<std::pair<double, double>> knots);

  static IncreasingAllocation constant(double value, double eta_lo, double eta_hi);
  static IncreasingAllocation linear(double eta_lo, double eta_hi);
  // 1{eta >= eta0} on [eta_lo, eta_hi].
  static IncreasingAllocation threshold(double eta0, double eta_lo, double eta_hi);

  Kind kind() const { return kind_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  double operator()(double eta) const;
  double left_limit(double eta) const;
  double right_limit(double eta) const;

 private:
  Kind kind_;
  std::vector<std::pair<double, double>> knots_;
};

IncreasingAllocation make_allocation(const AllocationSpec& spec, const MeritRange& range);

struct ThresholdConstants {
  double psi = 0.0;
  double zeta = 0.0;
};

// Threshold rule 1{eta > eta*} (or >= for Side::kHigh) implemented through
// the convex indirect utility
//   V(kappa, lambda) = max(0, kappa - kappa*(lambda)) + zeta lambda^2 / 2
//                      + lambda (psi - zeta lambda_hi)
// whose gradient is the (allocation, ordeal) pair.  Payments follow from
// p = kappa x + lambda q - V - payment_shift.
class ThresholdMechanism {
 public:
  ThresholdMechanism(LinearUtilitySpec spec, MeritFunction merit, double eta_star, Side side,
                     ThresholdConstants constants, ReparamRectangle rectangle,
                     std::size_t curve_samples);

  double eta_star() const { return eta_star_; }
  Side side() const { return side_; }
  const ThresholdConstants& constants() const { return constants_; }
  const ReparamRectangle& rectangle() const { return rect_; }
  const ThresholdCurve& curve() const { return curve_; }
  const LinearUtilitySpec& spec() const { return spec_; }
  const MeritFunction& merit() const { return merit_; }
  // -min V over the rectangle; the indirect utility V + payment_shift is >= 0.
  double payment_shift() const { return payment_shift_; }

  // Reparametrized coordinates; valid on the whole extended rectangle.
  double allocation_kl(const KL& p) const;
  double ordeal_kl(const KL& p) const;
  double indirect_utility(const KL& p) const;

  double allocation(const Type& t) const;
  Bundle bundle(const Type& t) const;

 private:
  bool allocates(double eta) const;
  double ordeal_base(double lambda) const;

  LinearUtilitySpec spec_;
  MeritFunction merit_;
  double eta_star_;
  Side side_;
  ThresholdConstants constants_;
  ReparamRectangle rect_;
  ThresholdCurve curve_;
  double payment_shift_ = 0.0;
};

struct MixtureComponent {
  double weight = 0.0;
  ThresholdMechanism mechanism;
};

// Weighted average of threshold mechanisms; residual weight gets (0, 0, 0).
class MixtureMechanism {
 public:
  MixtureMechanism(std::vector<MixtureComponent> components, IncreasingAllocation target,
                   double sup_error_bound);

  const std::vector<MixtureComponent>& components() const { return components_; }
  const IncreasingAllocation& target() const { return target_; }
  double sup_error_bound() const { return sup_error_bound_; }
  double total_weight() const;

  double allocation(const Type& t) const;
  Bundle bundle(const Type& t) const;

 private:
  std::vector<MixtureComponent> components_;
  IncreasingAllocation target_;
  double sup_error_bound_;
};

// Observable alpha: for each alpha a one-dimensional envelope menu in beta,
//   t(beta) = beta x(beta) - int_{beta_lo}^{beta} x(s) ds,
// charged as p = t / w(alpha) or q = t / z(alpha).
class ConditionalMechanism {
 public:
  ConditionalMechanism(LinearUtilitySpec spec, MeritFunction merit, IncreasingAllocation xhat,
                       Instrument instrument, double beta_lo);

  Instrument instrument() const { return instrument_; }
  const MeritFunction& merit() const { return merit_; }
  const IncreasingAllocation& xhat() const { return xhat_; }
  double allocation(const Type& t) const;
  double transfer(const Type& t) const;  // t(beta) in utility units
  Bundle bundle(const Type& t) const;

 private:
  LinearUtilitySpec spec_;
  MeritFunction merit_;
  IncreasingAllocation xhat_;
  Instrument instrument_;
  double beta_lo_;
};

// Posted ordeal: (1, 0, q*) for beta / z(alpha) >= q*, else nothing.
class PostedOrdealMechanism {
 public:
  PostedOrdealMechanism(LinearUtilitySpec spec, double q_star)
      : spec_(std::move(spec)), q_star_(q_star) {}
  double q_star() const { return q_star_; }
  Bundle bundle(const Type& t) const;

 private:
  LinearUtilitySpec spec_;
  double q_star_;
};

// Two-item menu {(0, 0, 0), (x_b, 0, q_b)} with v(beta_b, x_b) = z(alpha_b, q_b):
// types on or above the anchor's indifference curve take the good.
class OneStepOrdealMechanism {
 public:
  OneStepOrdealMechanism(NonlinearUtilitySpec spec, Type anchor, double x_b, double q_b)
      : spec_(std::move(spec)), anchor_(anchor), x_b_(x_b), q_b_(q_b) {}

  const NonlinearUtilitySpec& spec() const { return spec_; }
  const Type& anchor() const { return anchor_; }
  double x_b() const { return x_b_; }
  double q_b() const { return q_b_; }
  // v(beta, x_b) - z(alpha, q_b); the jump curve is its zero set.
  double take_margin(const Type& t) const;
  Bundle bundle(const Type& t) const;

 private:
  NonlinearUtilitySpec spec_;
  Type anchor_;
  double x_b_;
  double q_b_;
};

// Payments only: x = logistic((kappa - center) / width), priced by the
// envelope formula in kappa with zero rent at kappa_lo.
class PaymentScreenMechanism {
 public:
  PaymentScreenMechanism(LinearUtilitySpec spec, double center, double width,
                         double kappa_lo);
  Bundle bundle(const Type& t) const;

 private:
  LinearUtilitySpec spec_;
  double center_;
  double width_;
  double kappa_lo_;
};

// Bundles stored per grid node.
struct GridSampled {
  Grid grid;
  std::vector<Bundle> bundles;
};

class Mechanism {
 public:
  using Repr = std::variant<ThresholdMechanism, MixtureMechanism, ConditionalMechanism,
                            PostedOrdealMechanism, OneStepOrdealMechanism,
                            PaymentScreenMechanism, GridSampled>;

  Mechanism(UtilityModel utility, Repr repr, bool merit_measurable,
            std::optional<double> ordeal_cap = std::nullopt);

  const UtilityModel& utility() const { return utility_; }
  const Repr& repr() const { return repr_; }
  template <typename T>
  const T* get() const { return std::get_if<T>(&repr_); }

  bool closed_form() const { return !std::holds_alternative<GridSampled>(repr_); }
  // True when x is computed as x_hat(eta) by construction.
  bool merit_measurable() const { return merit_measurable_; }
  const std::optional<double>& ordeal_cap() const { return ordeal_cap_; }
  std::string_view kind_name() const;

  // Closed-form evaluation; throws kInvalidArgument for grid-sampled mechanisms.
  Bundle at(const Type& t) const;
  double allocation_at(const Type& t) const;
  // Bundles at every grid node; grid-sampled mechanisms need the same grid.
  // Throws kInvalidArgument if a bundle breaks x in [0,1], q >= 0 (q <= cap) or p finite.
  std::vector<Bundle> sample(const Grid& grid) const;

 private:
  UtilityModel utility_;
  Repr repr_;
  bool merit_measurable_;
  std::optional<double> ordeal_cap_;
};

}  // namespace mechlab

#endif  // MECHLAB_MECHANISM_HPP_
