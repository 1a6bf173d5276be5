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

#include "mechlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mechlab/error.hpp"

namespace mechlab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedScenario: return "MalformedScenario";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kOutOfImage: return "OutOfImage";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kBadThreshold: return "BadThreshold";
    case ErrorCode::kNotMonotone: return "NotMonotone";
    case ErrorCode::kNotKnifeEdge: return "NotKnifeEdge";
    case ErrorCode::kOrdealCapExceeded: return "OrdealCapExceeded";
    case ErrorCode::kNotEquitable: return "NotEquitable";
    case ErrorCode::kDegenerateJump: return "DegenerateJump";
    case ErrorCode::kNotApplicable: return "NotApplicable";
    case ErrorCode::kSolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

namespace {

bool finite_all(std::initializer_list<double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string fmt_params(const char* name, const std::vector<double>& params) {
  std::ostringstream os;
  os.precision(17);
  os << name << '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) os << ", ";
    os << params[i];
  }
  os << ')';
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- TypeSpace

TypeSpace::TypeSpace(double alpha_lo, double alpha_hi, double beta_lo,
                     double beta_hi)
    : alpha_lo_(alpha_lo), alpha_hi_(alpha_hi), beta_lo_(beta_lo),
      beta_hi_(beta_hi) {
  if (!finite_all({alpha_lo, alpha_hi, beta_lo, beta_hi})) {
    throw Error(ErrorCode::kMalformedScenario, "type space bounds must be finite");
  }
  if (!(alpha_lo < alpha_hi)) {
    throw Error(ErrorCode::kMalformedScenario, "alpha_lo must be below alpha_hi");
  }
  if (!(0.0 < beta_lo && beta_lo < beta_hi)) {
    throw Error(ErrorCode::kMalformedScenario, "need 0 < beta_lo < beta_hi");
  }
}

double TypeSpace::diameter() const {
  return std::hypot(alpha_hi_ - alpha_lo_, beta_hi_ - beta_lo_);
}

bool TypeSpace::contains(const Type& t) const {
  return t.alpha > alpha_lo_ && t.alpha < alpha_hi_ && t.beta > beta_lo_ &&
         t.beta < beta_hi_;
}

// ------------------------------------------------------------- ScalarFamily

ScalarFamily::ScalarFamily(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  for (double p : params_) {
    if (!std::isfinite(p)) {
      throw Error(ErrorCode::kMalformedScenario,
                  "non-finite family parameter in " + describe());
    }
  }
}

ScalarFamily ScalarFamily::exponential(double a, double b) {
  ScalarFamily f(Kind::kExponential, {a, b});
  if (!(a > 0.0)) {
    throw Error(ErrorCode::kMalformedScenario,
                "exponential family needs a > 0, got " + f.describe());
  }
  return f;
}

ScalarFamily ScalarFamily::power(double a, double c, double p) {
  ScalarFamily f(Kind::kPower, {a, c, p});
  if (!(a > 0.0) || p == 0.0) {
    throw Error(ErrorCode::kMalformedScenario,
                "power family needs a > 0 and p != 0, got " + f.describe());
  }
  return f;
}

ScalarFamily ScalarFamily::affine(double a, double b) {
  return ScalarFamily(Kind::kAffine, {a, b});
}

double ScalarFamily::value(double alpha) const {
  switch (kind_) {
    case Kind::kExponential: return params_[0] * std::exp(params_[1] * alpha);
    case Kind::kPower: return params_[0] * std::pow(alpha + params_[1], params_[2]);
    case Kind::kAffine: return params_[0] + params_[1] * alpha;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ScalarFamily::d1(double alpha) const {
  switch (kind_) {
    case Kind::kExponential:
      return params_[0] * params_[1] * std::exp(params_[1] * alpha);
    case Kind::kPower:
      return params_[0] * params_[2] * std::pow(alpha + params_[1], params_[2] - 1.0);
    case Kind::kAffine: return params_[1];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ScalarFamily::d2(double alpha) const {
  switch (kind_) {
    case Kind::kExponential:
      return params_[0] * params_[1] * params_[1] * std::exp(params_[1] * alpha);
    case Kind::kPower:
      return params_[0] * params_[2] * (params_[2] - 1.0) *
             std::pow(alpha + params_[1], params_[2] - 2.0);
    case Kind::kAffine: return 0.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::optional<double> ScalarFamily::domain_lo() const {
  if (kind_ == Kind::kPower) return -params_[1];
  return std::nullopt;
}

std::string ScalarFamily::describe() const {
  switch (kind_) {
    case Kind::kExponential: return fmt_params("exponential", params_);
    case Kind::kPower: return fmt_params("power", params_);
    case Kind::kAffine: return fmt_params("affine", params_);
  }
  return "unknown";
}

// -------------------------------------------------------------- ShapeFamily

ShapeFamily ShapeFamily::identity() { return ShapeFamily(Kind::kIdentity, 0.0); }

ShapeFamily ShapeFamily::log1p(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kMalformedScenario, "log1p shape needs finite c > 0");
  }
  return ShapeFamily(Kind::kLog1p, c);
}

ShapeFamily ShapeFamily::quadratic(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kMalformedScenario, "quadratic shape needs finite c >= 0");
  }
  return ShapeFamily(Kind::kQuadratic, c);
}

ShapeFamily ShapeFamily::expm1(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kMalformedScenario, "expm1 shape needs finite c > 0");
  }
  return ShapeFamily(Kind::kExpm1, c);
}

double ShapeFamily::value(double s) const {
  switch (kind_) {
    case Kind::kIdentity: return s;
    case Kind::kLog1p: return std::log1p(c_ * s) / c_;
    case Kind::kQuadratic: return s + 0.5 * c_ * s * s;
    case Kind::kExpm1: return std::expm1(c_ * s) / c_;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double ShapeFamily::d1(double s) const {
  switch (kind_) {
    case Kind::kIdentity: return 1.0;
    case Kind::kLog1p: return 1.0 / (1.0 + c_ * s);
    case Kind::kQuadratic: return 1.0 + c_ * s;
    case Kind::kExpm1: return std::exp(c_ * s);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::string ShapeFamily::describe() const {
  switch (kind_) {
    case Kind::kIdentity: return "identity";
    case Kind::kLog1p: return fmt_params("log1p", {c_});
    case Kind::kQuadratic: return fmt_params("quadratic", {c_});
    case Kind::kExpm1: return fmt_params("expm1", {c_});
  }
  return "unknown";
}

// ---------------------------------------------------------- nonlinear utility

double NonlinearUtilitySpec::v(double beta, double x) const {
  return beta * v_shape.value(x);
}
double NonlinearUtilitySpec::v_x(double beta, double x) const {
  return beta * v_shape.d1(x);
}
double NonlinearUtilitySpec::v_beta(double, double x) const { return v_shape.value(x); }
double NonlinearUtilitySpec::v_beta_x(double, double x) const { return v_shape.d1(x); }

double NonlinearUtilitySpec::w(double alpha, double p) const {
  return w_weight.value(alpha) * w_shape.value(p);
}
double NonlinearUtilitySpec::w_p(double alpha, double p) const {
  return w_weight.value(alpha) * w_shape.d1(p);
}
double NonlinearUtilitySpec::w_alpha_p(double alpha, double p) const {
  return w_weight.d1(alpha) * w_shape.d1(p);
}

double NonlinearUtilitySpec::z(double alpha, double q) const {
  return z_weight.value(alpha) * z_shape.value(q);
}
double NonlinearUtilitySpec::z_q(double alpha, double q) const {
  return z_weight.value(alpha) * z_shape.d1(q);
}
double NonlinearUtilitySpec::z_alpha(double alpha, double q) const {
  return z_weight.d1(alpha) * z_shape.value(q);
}
double NonlinearUtilitySpec::z_alpha_q(double alpha, double q) const {
  return z_weight.d1(alpha) * z_shape.d1(q);
}

NonlinearUtilitySpec as_nonlinear(const LinearUtilitySpec& spec, double q_bar) {
  return NonlinearUtilitySpec{ShapeFamily::identity(), spec.w, ShapeFamily::identity(),
                              spec.z, ShapeFamily::identity(), q_bar};
}

// ------------------------------------------------------------ MeritFunction

MeritFunction::MeritFunction(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {
  for (double p : params_) {
    if (!std::isfinite(p)) {
      throw Error(ErrorCode::kMalformedScenario, "non-finite merit parameter");
    }
  }
}

MeritFunction MeritFunction::weighted_sum(double a, double b) {
  return MeritFunction(Kind::kWeightedSum, {a, b});
}

MeritFunction MeritFunction::product(double c) {
  return MeritFunction(Kind::kProduct, {c});
}

double MeritFunction::eta(const Type& t) const {
  if (kind_ == Kind::kWeightedSum) return params_[0] * t.alpha + params_[1] * t.beta;
  return t.beta * std::exp(params_[0] * t.alpha);
}

double MeritFunction::eta_alpha(const Type& t) const {
  if (kind_ == Kind::kWeightedSum) return params_[0];
  return params_[0] * t.beta * std::exp(params_[0] * t.alpha);
}

double MeritFunction::eta_beta(const Type& t) const {
  if (kind_ == Kind::kWeightedSum) return params_[1];
  return std::exp(params_[0] * t.alpha);
}

double MeritFunction::eta_alpha_alpha(const Type& t) const {
  if (kind_ == Kind::kWeightedSum) return 0.0;
  return params_[0] * params_[0] * t.beta * std::exp(params_[0] * t.alpha);
}

double MeritFunction::eta_alpha_beta(const Type& t) const {
  if (kind_ == Kind::kWeightedSum) return 0.0;
  return params_[0] * std::exp(params_[0] * t.alpha);
}

double MeritFunction::eta_beta_beta(const Type&) const { return 0.0; }

std::string MeritFunction::describe() const {
  return kind_ == Kind::kWeightedSum ? fmt_params("weighted_sum", params_)
                                     : fmt_params("product", params_);
}

MeritRange merit_range(const MeritFunction& merit, const TypeSpace& space) {
  constexpr int kEdgeSamples = 256;
  MeritRange range{std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
  auto visit = [&](double a, double b) {
    const double e = merit.eta({a, b});
    range.lo = std::min(range.lo, e);
    range.hi = std::max(range.hi, e);
  };
  for (int k = 0; k <= kEdgeSamples; ++k) {
    const double s = static_cast<double>(k) / kEdgeSamples;
    const double a = space.alpha_lo() + s * (space.alpha_hi() - space.alpha_lo());
    const double b = space.beta_lo() + s * (space.beta_hi() - space.beta_lo());
    visit(a, space.beta_lo());
    visit(a, space.beta_hi());
    visit(space.alpha_lo(), b);
    visit(space.alpha_hi(), b);
  }
  return range;
}

// --------------------------------------------------------------------- Grid

Grid::Grid(const TypeSpace& space, std::size_t n_alpha, std::size_t n_beta)
    : space_(space), n_alpha_(n_alpha), n_beta_(n_beta) {
  if (n_alpha < 2 || n_beta < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least 2 nodes per axis");
  }
}

double Grid::alpha_step() const {
  return (space_.alpha_hi() - space_.alpha_lo()) / static_cast<double>(n_alpha_);
}

double Grid::beta_step() const {
  return (space_.beta_hi() - space_.beta_lo()) / static_cast<double>(n_beta_);
}

double Grid::alpha(std::size_t i) const {
  return space_.alpha_lo() + (static_cast<double>(i) + 0.5) * alpha_step();
}

double Grid::beta(std::size_t j) const {
  return space_.beta_lo() + (static_cast<double>(j) + 0.5) * beta_step();
}

Type Grid::node(std::size_t index) const {
  return node(index / n_beta_, index % n_beta_);
}

std::vector<Type> Grid::nodes() const {
  std::vector<Type> out;
  out.reserve(size());
  for (std::size_t i = 0; i < n_alpha_; ++i) {
    for (std::size_t j = 0; j < n_beta_; ++j) out.push_back(node(i, j));
  }
  return out;
}

bool operator==(const Grid& a, const Grid& b) {
  return a.n_alpha_ == b.n_alpha_ && a.n_beta_ == b.n_beta_ &&
         a.space_.alpha_lo() == b.space_.alpha_lo() &&
         a.space_.alpha_hi() == b.space_.alpha_hi() &&
         a.space_.beta_lo() == b.space_.beta_lo() &&
         a.space_.beta_hi() == b.space_.beta_hi();
}

Grid make_grid(const TypeSpace& space, std::size_t n_alpha, std::size_t n_beta) {
  return Grid(space, n_alpha, n_beta);
}

// ------------------------------------------------------------------ utility

double eval_utility(const LinearUtilitySpec& spec, const Type& t, const Bundle& b) {
  return t.beta * b.x - spec.w.value(t.alpha) * b.p - spec.z.value(t.alpha) * b.q;
}

double eval_utility(const NonlinearUtilitySpec& spec, const Type& t, const Bundle& b) {
  return spec.v(t.beta, b.x) - spec.w(t.alpha, b.p) - spec.z(t.alpha, b.q);
}

double eval_utility(const UtilityModel& model, const Type& t, const Bundle& b) {
  return std::visit([&](const auto& spec) { return eval_utility(spec, t, b); }, model);
}

}  // namespace mechlab
