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

#include "mechlab/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "mechlab/error.hpp"
#include "numeric.hpp"

namespace mechlab {

// ------------------------------------------------------ IncreasingAllocation

IncreasingAllocation::IncreasingAllocation(Kind kind,
                                           std::vector<std::pair<double, double>> knots)
    : kind_(kind), knots_(std::move(knots)) {
  if (knots_.empty()) throw Error(ErrorCode::kInvalidArgument, "allocation needs knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const auto [eta, x] = knots_[i];
    if (!std::isfinite(eta) || !(x >= 0.0 && x <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "allocation knot outside [0,1] or non-finite");
    }
    if (i > 0) {
      if (!(eta > knots_[i - 1].first)) {
        throw Error(ErrorCode::kInvalidArgument, "allocation knots must increase in eta");
      }
      if (x < knots_[i - 1].second) {
        throw Error(ErrorCode::kNotMonotone,
                    "allocation decreases between eta = " + std::to_string(knots_[i - 1].first) +
                        " and " + std::to_string(eta));
      }
    }
  }
}

IncreasingAllocation IncreasingAllocation::constant(double value, double eta_lo, double eta_hi) {
  return IncreasingAllocation(Kind::kLinear, {{eta_lo, value}, {eta_hi, value}});
}

IncreasingAllocation IncreasingAllocation::linear(double eta_lo, double eta_hi) {
  return IncreasingAllocation(Kind::kLinear, {{eta_lo, 0.0}, {eta_hi, 1.0}});
}

IncreasingAllocation IncreasingAllocation::threshold(double eta0, double eta_lo,
                                                     double eta_hi) {
  std::vector<std::pair<double, double>> knots;
  if (eta_lo < eta0) knots.emplace_back(eta_lo, 0.0);
  knots.emplace_back(eta0, 1.0);
  if (eta_hi > eta0) knots.emplace_back(eta_hi, 1.0);
  return IncreasingAllocation(Kind::kStep, std::move(knots));
}

double IncreasingAllocation::operator()(double eta) const {
  if (eta <= knots_.front().first) return knots_.front().second;
  if (eta >= knots_.back().first) return knots_.back().second;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), eta,
                                   [](double e, const auto& k) { return e < k.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  if (kind_ == Kind::kStep) return lo.second;
  const double s = (eta - lo.first) / (hi.first - lo.first);
  return lo.second + s * (hi.second - lo.second);
}

double IncreasingAllocation::right_limit(double eta) const {
  // Both kinds are right-continuous.
  return (*this)(eta);
}

double IncreasingAllocation::left_limit(double eta) const {
  if (kind_ == Kind::kLinear) return (*this)(eta);
  if (eta <= knots_.front().first) return knots_.front().second;
  const auto it = std::lower_bound(knots_.begin(), knots_.end(), eta,
                                   [](const auto& k, double e) { return k.first < e; });
  return (it - 1)->second;
}

IncreasingAllocation make_allocation(const AllocationSpec& spec, const MeritRange& range) {
  const auto kind = spec.kind == AllocationSpec::Kind::kStep ? IncreasingAllocation::Kind::kStep
                                                             : IncreasingAllocation::Kind::kLinear;
  if (spec.knots.empty()) {
    if (kind == IncreasingAllocation::Kind::kStep) {
      return IncreasingAllocation::threshold(0.5 * (range.lo + range.hi), range.lo, range.hi);
    }
    return IncreasingAllocation::linear(range.lo, range.hi);
  }
  return IncreasingAllocation(kind, spec.knots);
}

// ------------------------------------------------------- ThresholdMechanism

ThresholdMechanism::ThresholdMechanism(LinearUtilitySpec spec, MeritFunction merit,
                                       double eta_star, Side side, ThresholdConstants constants,
                                       ReparamRectangle rectangle, std::size_t curve_samples)
    : spec_(std::move(spec)),
      merit_(std::move(merit)),
      eta_star_(eta_star),
      side_(side),
      constants_(constants),
      rect_(rectangle),
      curve_(spec_, merit_, eta_star, rectangle.lambda_lo, rectangle.lambda_hi, curve_samples) {
  // V is nondecreasing in kappa, so its minimum sits on the kappa_lo edge.
  auto edge = [&](double l) { return indirect_utility({rect_.kappa_lo, l}); };
  constexpr int kScan = 1000;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double l = rect_.lambda_lo + rect_.lambda_span() * i / kScan;
    const double v = edge(l);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double lo = rect_.lambda_lo + rect_.lambda_span() * std::max(best - 1, 0) / kScan;
  const double hi = rect_.lambda_lo + rect_.lambda_span() * std::min(best + 1, kScan) / kScan;
  const auto refined = boost::math::tools::brent_find_minima(edge, lo, hi, 52);
  payment_shift_ = -std::min(best_v, refined.second);
}

bool ThresholdMechanism::allocates(double eta) const {
  return side_ == Side::kLow ? eta > eta_star_ : eta >= eta_star_;
}

double ThresholdMechanism::ordeal_base(double lambda) const {
  return constants_.psi - constants_.zeta * rect_.lambda_hi + constants_.zeta * lambda;
}

double ThresholdMechanism::allocation_kl(const KL& p) const {
  const double ks = kappa_star(spec_, merit_, eta_star_, p.lambda);
  return (side_ == Side::kLow ? p.kappa > ks : p.kappa >= ks) ? 1.0 : 0.0;
}

double ThresholdMechanism::ordeal_kl(const KL& p) const {
  const KappaStar ks = kappa_star_derivs(spec_, merit_, eta_star_, p.lambda);
  const bool on = side_ == Side::kLow ? p.kappa > ks.value : p.kappa >= ks.value;
  return ordeal_base(p.lambda) - (on ? ks.d1 : 0.0);
}

double ThresholdMechanism::indirect_utility(const KL& p) const {
  const double ks = kappa_star(spec_, merit_, eta_star_, p.lambda);
  const double l = p.lambda;
  return std::max(0.0, p.kappa - ks) + 0.5 * constants_.zeta * l * l +
         l * (constants_.psi - constants_.zeta * rect_.lambda_hi);
}

double ThresholdMechanism::allocation(const Type& t) const {
  return allocates(merit_.eta(t)) ? 1.0 : 0.0;
}

Bundle ThresholdMechanism::bundle(const Type& t) const {
  const KL p = to_kl(spec_, t);
  const KappaStar ks = kappa_star_derivs(spec_, merit_, eta_star_, p.lambda);
  const double x = allocation(t);
  const double q = ordeal_base(p.lambda) - x * ks.d1;
  const double v = std::max(0.0, p.kappa - ks.value) + 0.5 * constants_.zeta * p.lambda * p.lambda +
                   p.lambda * (constants_.psi - constants_.zeta * rect_.lambda_hi);
  return {x, p.kappa * x + p.lambda * q - v - payment_shift_, q};
}

// --------------------------------------------------------- MixtureMechanism

MixtureMechanism::MixtureMechanism(std::vector<MixtureComponent> components,
                                   IncreasingAllocation target, double sup_error_bound)
    : components_(std::move(components)),
      target_(std::move(target)),
      sup_error_bound_(sup_error_bound) {}

double MixtureMechanism::total_weight() const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight;
  return s;
}

double MixtureMechanism::allocation(const Type& t) const {
  double x = 0.0;
  for (const auto& c : components_) x += c.weight * c.mechanism.allocation(t);
  return x;
}

Bundle MixtureMechanism::bundle(const Type& t) const {
  Bundle out;
  for (const auto& c : components_) {
    const Bundle b = c.mechanism.bundle(t);
    out.x += c.weight * b.x;
    out.p += c.weight * b.p;
    out.q += c.weight * b.q;
  }
  return out;
}

// ----------------------------------------------------- ConditionalMechanism

ConditionalMechanism::ConditionalMechanism(LinearUtilitySpec spec, MeritFunction merit,
                                           IncreasingAllocation xhat, Instrument instrument,
                                           double beta_lo)
    : spec_(std::move(spec)),
      merit_(std::move(merit)),
      xhat_(std::move(xhat)),
      instrument_(instrument),
      beta_lo_(beta_lo) {}

double ConditionalMechanism::allocation(const Type& t) const { return xhat_(merit_.eta(t)); }

double ConditionalMechanism::transfer(const Type& t) const {
  const double a = t.alpha;
  if (t.beta <= beta_lo_) return 0.0;
  // Split [beta_lo, beta] where eta(a, s) crosses a knot, then integrate the
  // smooth pieces.
  std::vector<double> cuts{beta_lo_};
  auto g = [&](double s) { return merit_.eta({a, s}); };
  for (const auto& [eta_k, x_k] : xhat_.knots()) {
    (void)x_k;
    const double f_lo = g(beta_lo_) - eta_k;
    const double f_hi = g(t.beta) - eta_k;
    if (f_lo < 0.0 && f_hi > 0.0) {
      cuts.push_back(detail::solve_bracketed([&](double s) { return g(s) - eta_k; }, beta_lo_,
                                             t.beta));
    }
  }
  cuts.push_back(t.beta);
  std::sort(cuts.begin(), cuts.end());
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i], r = cuts[i + 1];
    if (!(r > l)) continue;
    if (xhat_.kind() == IncreasingAllocation::Kind::kStep) {
      integral += (r - l) * xhat_(g(0.5 * (l + r)));
    } else {
      integral += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          [&](double s) { return xhat_(g(s)); }, l, r, 0);
    }
  }
  return t.beta * allocation(t) - integral;
}

Bundle ConditionalMechanism::bundle(const Type& t) const {
  const double x = allocation(t);
  const double tr = transfer(t);
  if (instrument_ == Instrument::kPayments) return {x, tr / spec_.w.value(t.alpha), 0.0};
  return {x, 0.0, tr / spec_.z.value(t.alpha)};
}

// ------------------------------------------------------------------ others

Bundle PostedOrdealMechanism::bundle(const Type& t) const {
  if (t.beta / spec_.z.value(t.alpha) >= q_star_) return {1.0, 0.0, q_star_};
  return {};
}

double OneStepOrdealMechanism::take_margin(const Type& t) const {
  return spec_.v(t.beta, x_b_) - spec_.z(t.alpha, q_b_);
}

Bundle OneStepOrdealMechanism::bundle(const Type& t) const {
  // Ties (the anchor itself included) take the good.
  const double scale = spec_.v(t.beta, x_b_) + spec_.z(t.alpha, q_b_);
  if (take_margin(t) >= -1e-12 * scale) return {x_b_, 0.0, q_b_};
  return {};
}

PaymentScreenMechanism::PaymentScreenMechanism(LinearUtilitySpec spec, double center,
                                               double width, double kappa_lo)
    : spec_(std::move(spec)), center_(center), width_(width), kappa_lo_(kappa_lo) {
  if (!(width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "screen width must be positive");
}

Bundle PaymentScreenMechanism::bundle(const Type& t) const {
  auto softplus = [](double u) { return u > 0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u)); };
  const double k = to_kl(spec_, t).kappa;
  const double u = (k - center_) / width_;
  const double x = 1.0 / (1.0 + std::exp(-u));
  const double rent = width_ * (softplus(u) - softplus((kappa_lo_ - center_) / width_));
  return {x, k * x - rent, 0.0};
}

// ---------------------------------------------------------------- Mechanism

Mechanism::Mechanism(UtilityModel utility, Repr repr, bool merit_measurable,
                     std::optional<double> ordeal_cap)
    : utility_(std::move(utility)),
      repr_(std::move(repr)),
      merit_measurable_(merit_measurable),
      ordeal_cap_(ordeal_cap) {}

std::string_view Mechanism::kind_name() const {
  struct Namer {
    std::string_view operator()(const ThresholdMechanism&) const { return "threshold"; }
    std::string_view operator()(const MixtureMechanism&) const { return "mixture"; }
    std::string_view operator()(const ConditionalMechanism&) const { return "conditional"; }
    std::string_view operator()(const PostedOrdealMechanism&) const { return "posted_ordeal"; }
    std::string_view operator()(const OneStepOrdealMechanism&) const { return "one_step_ordeal"; }
    std::string_view operator()(const PaymentScreenMechanism&) const { return "payment_screen"; }
    std::string_view operator()(const GridSampled&) const { return "grid_sampled"; }
  };
  return std::visit(Namer{}, repr_);
}

Bundle Mechanism::at(const Type& t) const {
  return std::visit(
      [&](const auto& m) -> Bundle {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GridSampled>) {
          throw Error(ErrorCode::kInvalidArgument,
                      "grid-sampled mechanisms are only defined at their grid nodes");
        } else {
          return m.bundle(t);
        }
      },
      repr_);
}

double Mechanism::allocation_at(const Type& t) const {
  if (const auto* m = get<ThresholdMechanism>()) return m->allocation(t);
  if (const auto* m = get<MixtureMechanism>()) return m->allocation(t);
  if (const auto* m = get<ConditionalMechanism>()) return m->allocation(t);
  return at(t).x;
}

std::vector<Bundle> Mechanism::sample(const Grid& grid) const {
  std::vector<Bundle> out;
  if (const auto* gs = get<GridSampled>()) {
    if (!(gs->grid == grid)) {
      throw Error(ErrorCode::kInvalidArgument, "grid-sampled mechanism queried on another grid");
    }
    out = gs->bundles;
  } else {
    out.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(at(grid.node(k)));
  }
  constexpr double kSlack = 1e-12;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Bundle& b = out[k];
    const bool ok = b.x >= -kSlack && b.x <= 1.0 + kSlack && b.q >= -kSlack &&
                    (!ordeal_cap_ || b.q <= *ordeal_cap_ + kSlack) && std::isfinite(b.p);
    if (!ok) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bundle at node " + std::to_string(k) + " violates x in [0,1], q >= 0, "
                  "q <= cap or finite p");
    }
  }
  return out;
}

}  // namespace mechlab
