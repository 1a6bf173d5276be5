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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mechlab/construct.hpp"
#include "mechlab/error.hpp"
#include "mechlab/fairness.hpp"
#include "mechlab/reparam.hpp"
#include "mechlab/verify.hpp"

namespace mechlab::cli {
namespace {

using detail::Csv;
using detail::Json;
using detail::number;
using detail::Report;
using detail::type_json;

Type default_anchor(const Scenario& sc) {
  const TypeSpace& s = sc.space;
  return {0.5 * (s.alpha_lo() + s.alpha_hi()), 0.5 * (s.beta_lo() + s.beta_hi())};
}

double default_threshold(const Scenario& sc) {
  const MeritRange r = merit_range(sc.merit, sc.space);
  return sc.mechanism.threshold.value_or(0.5 * (r.lo + r.hi));
}

const LinearUtilitySpec& require_linear(const Scenario& sc, std::string_view what) {
  if (!sc.is_linear()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " needs a linear utility");
  }
  return sc.linear();
}

NonlinearUtilitySpec require_ordeal_cap(const Scenario& sc, std::string_view what) {
  if (!sc.ordeal_cap) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " needs an ordeal cap ([utility] q_bar)");
  }
  return sc.nonlinear();
}

// Which grid-free argument backs IC for a mechanism kind.
std::string_view certificate_of(const Mechanism& m) {
  if (m.get<ThresholdMechanism>() || m.get<MixtureMechanism>()) return "subgradient";
  if (m.get<ConditionalMechanism>() || m.get<PaymentScreenMechanism>()) return "envelope";
  if (m.get<PostedOrdealMechanism>() || m.get<OneStepOrdealMechanism>()) return "menu";
  return "grid-certified only";
}

Json threshold_json(const ThresholdMechanism& t) {
  const ReparamRectangle& r = t.rectangle();
  return Json{{"eta_star", t.eta_star()},
              {"side", side_name(t.side())},
              {"psi", t.constants().psi},
              {"zeta", t.constants().zeta},
              {"payment_shift", t.payment_shift()},
              {"rectangle",
               {{"kappa_lo", r.kappa_lo},
                {"kappa_hi", r.kappa_hi},
                {"lambda_lo", r.lambda_lo},
                {"lambda_hi", r.lambda_hi}}}};
}

Json mechanism_json(const Mechanism& m) {
  Json j{{"kind", m.kind_name()},
         {"merit_measurable", m.merit_measurable()},
         {"certificate", certificate_of(m)}};
  if (const auto* t = m.get<ThresholdMechanism>()) {
    j["threshold"] = threshold_json(*t);
  } else if (const auto* mx = m.get<MixtureMechanism>()) {
    Json terms = Json::array();
    for (const auto& c : mx->components()) {
      terms.push_back({{"weight", c.weight},
                       {"eta_star", c.mechanism.eta_star()},
                       {"side", side_name(c.mechanism.side())},
                       {"psi", c.mechanism.constants().psi},
                       {"zeta", c.mechanism.constants().zeta}});
    }
    j["mixture"] = {{"components", mx->components().size()},
                    {"total_weight", mx->total_weight()},
                    {"sup_error_bound", mx->sup_error_bound()},
                    {"terms", terms}};
  } else if (const auto* c = m.get<ConditionalMechanism>()) {
    j["conditional"] = {{"instrument", instrument_name(c->instrument())}};
  } else if (const auto* p = m.get<PostedOrdealMechanism>()) {
    j["posted_ordeal"] = {{"q_star", p->q_star()}};
  } else if (const auto* o = m.get<OneStepOrdealMechanism>()) {
    j["one_step_ordeal"] = {{"anchor", type_json(o->anchor())}, {"x_b", o->x_b()}, {"q_b", o->q_b()}};
  }
  if (m.ordeal_cap()) j["ordeal_cap"] = *m.ordeal_cap();
  return j;
}

std::string mechanism_csv(const Scenario& sc, const Mechanism& m) {
  const Grid grid = sc.grid();
  const std::vector<Bundle> b = m.sample(grid);
  if (sc.is_linear()) {
    const LinearUtilitySpec& spec = sc.linear();
    Csv csv({"alpha", "beta", "kappa", "lambda", "eta", "x", "p", "q", "V_implied"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Type t = grid.node(i);
      const KL kl = to_kl(spec, t);
      csv.row(std::vector<double>{t.alpha, t.beta, kl.kappa, kl.lambda, sc.merit.eta(t), b[i].x,
                                  b[i].p, b[i].q,
                                  kl.kappa * b[i].x + kl.lambda * b[i].q - b[i].p});
    }
    return csv.str();
  }
  Csv csv({"alpha", "beta", "eta", "x", "p", "q", "utility"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Type t = grid.node(i);
    csv.row(std::vector<double>{t.alpha, t.beta, sc.merit.eta(t), b[i].x, b[i].p, b[i].q,
                                eval_utility(sc.utility, t, b[i])});
  }
  return csv.str();
}

Json check_json(std::string_view name, bool pass, double value, double tolerance,
                Json witness = nullptr) {
  return Json{{"check", name},
              {"pass", pass},
              {"value", number(value)},
              {"tolerance", tolerance},
              {"witness", std::move(witness)}};
}

}  // namespace

Mechanism build_mechanism(const Scenario& sc) {
  const MechanismSettings& ms = sc.mechanism;
  const MeritRange range = merit_range(sc.merit, sc.space);
  using Kind = MechanismSettings::Kind;
  switch (ms.kind) {
    case Kind::kThreshold: {
      const LinearUtilitySpec& spec = require_linear(sc, "threshold");
      return as_mechanism(spec, build_certified_threshold(spec, sc.merit, sc.space,
                                                          default_threshold(sc), ms.side,
                                                          sc.tol.margin, sc.tol.curve_samples));
    }
    case Kind::kMixture: {
      const LinearUtilitySpec& spec = require_linear(sc, "mixture");
      return as_mechanism(spec, build_mixture(spec, sc.merit, sc.space,
                                              make_allocation(ms.allocation, range),
                                              ms.components, sc.tol.margin,
                                              sc.tol.curve_samples));
    }
    case Kind::kConditional:
      return build_conditional(require_linear(sc, "conditional"), sc.merit,
                               make_allocation(ms.allocation, range), ms.instrument, sc.grid());
    case Kind::kKnifeEdge:
      return build_knife_edge_ordeal(require_linear(sc, "knife_edge"), sc.merit, sc.space,
                                     ms.knife_q);
    case Kind::kOneStep:
      return build_one_step_ordeal(require_ordeal_cap(sc, "one_step"), sc.space,
                                   ms.anchor.value_or(default_anchor(sc)), ms.x_b);
    case Kind::kPaymentScreen:
      return build_payment_screen(require_linear(sc, "payment_screen"), sc.space,
                                  ms.screen_center, ms.screen_width);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mechanism kind");
}

namespace detail {

Report cmd_validate(const Scenario& sc, const CommandSpec&) {
  const ValidationReport v = validate_scenario(sc);
  Report r;
  Json checks = Json::array();
  Csv csv({"check", "pass", "detail"});
  for (const auto& c : v.checks) {
    checks.push_back({{"check", c.name},
                      {"pass", c.pass},
                      {"detail", c.detail},
                      {"witness", c.witness ? type_json(*c.witness) : Json(nullptr)}});
    std::string quoted = "\"";
    for (char ch : c.detail) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    csv.row(std::vector<std::string>{c.name, c.pass ? "true" : "false", quoted + "\""});
  }
  r.body["checks"] = checks;
  r.body["merit_range"] = {{"lo", v.merit_range.lo}, {"hi", v.merit_range.hi}};
  r.body["min_eta_alpha"] = v.min_eta_alpha;
  r.body["min_eta_beta"] = v.min_eta_beta;
  r.pass = v.all_pass();
  r.csv.emplace_back("validate.csv", csv.str());
  return r;
}

Report cmd_construct(const Scenario& sc, const CommandSpec&) {
  const Mechanism m = build_mechanism(sc);
  Report r;
  r.body["mechanism"] = mechanism_json(m);
  if (const auto* t = m.get<ThresholdMechanism>()) {
    const ReparamRectangle& rect = t->rectangle();
    const CurvatureBounds cb = curvature_bounds(sc.linear(), sc.merit, t->eta_star(),
                                                rect.lambda_lo, rect.lambda_hi,
                                                sc.tol.curve_samples);
    r.body["curvature"] = {{"m1", cb.m1},
                           {"m2", cb.m2},
                           {"max_abs_d1", cb.max_abs_d1},
                           {"max_abs_d2", cb.max_abs_d2},
                           {"argmax_d1", cb.argmax_d1},
                           {"argmax_d2", cb.argmax_d2},
                           {"safety", kCurvatureSafety}};
  }
  r.csv.emplace_back("mechanism.csv", mechanism_csv(sc, m));
  return r;
}

Report cmd_verify(const Scenario& sc, const CommandSpec& cmd) {
  const Mechanism m = build_mechanism(sc);
  const Grid grid = sc.grid();
  Report r;
  r.body["mechanism"] = mechanism_json(m);
  Json checks = Json::array();
  auto add = [&](Json c) {
    r.pass = r.pass && c["pass"].get<bool>();
    checks.push_back(std::move(c));
  };

  const ICScope scope = m.get<ConditionalMechanism>() ? ICScope::kSameAlpha : ICScope::kAllPairs;
  const ICReport ic = check_ic(m, grid, sc.tol.ic, scope, cmd.threads);
  add(check_json("ic", ic.pass, ic.max_gain, ic.epsilon,
                 {{"type", type_json(ic.source_type)}, {"deviation", type_json(ic.target_type)}}));
  checks.back()["scope"] = scope == ICScope::kSameAlpha ? "same_alpha" : "all_pairs";
  checks.back()["n_pairs"] = ic.n_pairs;

  const IRReport ir = check_ir(m, grid, sc.tol.ir);
  add(check_json("ir", ir.pass, ir.min_utility, ir.tolerance, type_json(ir.witness)));

  const EquityReport eq = check_equity(m, sc.merit, grid, sc.tol.equity_bins, sc.tol.equity);
  add(check_json("equity", eq.pass, eq.max_spread, eq.tolerance,
                 Json::array({type_json(eq.witness_a), type_json(eq.witness_b)})));
  checks.back()["exact"] = eq.exact;
  checks.back()["bins"] = eq.bins;

  if (eq.pass) {
    const MonotonicityReport mo =
        check_merit_monotone(m, sc.merit, grid, sc.tol.equity, sc.tol.equity_bins);
    add(check_json("merit_monotone", mo.pass, mo.worst_drop, mo.tolerance,
                   Json::array({type_json(mo.witness_lo), type_json(mo.witness_hi)})));
  } else {
    Json c = check_json("merit_monotone", false, std::nan(""), sc.tol.equity);
    c["error"] = error_code_name(ErrorCode::kNotEquitable);
    add(std::move(c));
  }

  std::vector<const ThresholdMechanism*> thresholds;
  if (const auto* t = m.get<ThresholdMechanism>()) thresholds.push_back(t);
  if (const auto* mx = m.get<MixtureMechanism>()) {
    for (const auto& c : mx->components()) thresholds.push_back(&c.mechanism);
  }
  if (!thresholds.empty()) {
    const std::size_t per = std::max<std::size_t>(
        1000, sc.tol.convexity_trials / thresholds.size());
    double mid = std::numeric_limits<double>::infinity(), sub = mid;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      const ConvexityReport cv = check_convexity(*thresholds[k], per, cmd.seed + k);
      mid = std::min(mid, cv.min_midpoint_defect);
      sub = std::min(sub, cv.min_subgradient_defect);
    }
    add(check_json("convexity_midpoint", mid >= -1e-9, mid, 1e-9));
    checks.back()["trials_per_threshold"] = per;
    add(check_json("convexity_subgradient", sub >= -1e-9, sub, 1e-9));
    checks.back()["trials_per_threshold"] = per;
  }
  if (const auto* mx = m.get<MixtureMechanism>()) {
    double sup = 0.0;
    Type at;
    for (const Type& t : grid.nodes()) {
      const double e = std::abs(m.allocation_at(t) - mx->target()(sc.merit.eta(t)));
      if (e > sup) {
        sup = e;
        at = t;
      }
    }
    const double bound = mx->sup_error_bound() + 1e-12;
    add(check_json("approximation", sup <= bound, sup, bound, type_json(at)));
  }
  r.body["checks"] = checks;
  r.body["pass"] = r.pass;

  Csv csv({"check", "pass", "value", "tolerance"});
  for (const auto& c : checks) {
    const Json& v = c["value"];
    csv.row(std::vector<std::string>{c["check"].get<std::string>(),
                                     c["pass"].get<bool>() ? "true" : "false",
                                     v.is_number() ? format_double(v.get<double>())
                                                   : v.get<std::string>(),
                                     format_double(c["tolerance"].get<double>())});
  }
  r.csv.emplace_back("verify.csv", csv.str());
  return r;
}

Report cmd_probe(const Scenario& sc, const CommandSpec& cmd) {
  const LinearUtilitySpec& spec = require_linear(sc, "probe");
  const MechanismSettings& ms = sc.mechanism;
  const Instrument ins = cmd.instrument.value_or(ms.instrument);
  const Grid grid = make_grid(sc.space, ms.probe_n_alpha, ms.probe_n_beta);
  const ProbeResult p = probe_single_instrument(spec, sc.merit, grid, ins, ms.probe_classes);
  ProbeOptions uncoupled;
  uncoupled.couple_equity = false;
  const ProbeResult u = probe_single_instrument(spec, sc.merit, grid, ins, ms.probe_classes,
                                                uncoupled);
  const KnifeEdgeResult k =
      knife_edge_diagnostic(spec, sc.merit, sc.space, default_threshold(sc));
  Report r;
  r.body["instrument"] = instrument_name(ins);
  r.body["grid"] = {{"n_alpha", grid.n_alpha()}, {"n_beta", grid.n_beta()}};
  r.body["max_equitable_spread"] = p.max_equitable_spread;
  r.body["classes"] = p.n_classes;
  r.body["types"] = p.n_types;
  r.body["constraints"] = p.n_constraints;
  r.body["lps_solved"] = p.lps_solved;
  r.body["min_slack"] = p.min_slack;
  r.body["argmax"] = {{"hi", p.argmax_hi}, {"lo", p.argmax_lo}};
  r.body["certificate"] = {{"class_merit", p.class_merit}, {"x", p.x}, {"t", p.t}};
  r.body["uncoupled_spread"] = u.max_equitable_spread;
  r.body["knife_edge"] = {{"eta_star", default_threshold(sc)},
                          {"dispersion", k.dispersion},
                          {"r_min", k.r_min},
                          {"r_max", k.r_max},
                          {"escaped", k.escaped}};
  Csv csv({"class", "merit", "x", "t"});
  for (std::size_t m = 0; m < p.n_classes; ++m) {
    csv.row(std::vector<double>{static_cast<double>(m), p.class_merit[m], p.x[m], p.t[m]});
  }
  r.csv.emplace_back("probe.csv", csv.str());
  return r;
}

Report cmd_score(const Scenario& sc, const CommandSpec&) {
  const Mechanism m = build_mechanism(sc);
  const Grid grid = sc.grid();
  const AllocationField field = AllocationField::from_mechanism(m, grid);
  const ViolationReport v = global_violation(field, sc.merit, sc.tol.tau);
  const PaymentBound pb = payment_lower_bound(sc.merit, grid);
  Report r;
  r.body["mechanism"] = mechanism_json(m);
  r.body["global_violation"] = number(v.global);
  r.body["witness"] = {{"type", type_json(v.witness)}, {"on_jump_curve", v.witness_on_jump}};
  r.body["resolution"] = v.resolution;
  r.body["interior_nodes"] = v.n_interior;
  r.body["jump_points"] = v.n_jump_points;
  r.body["tau"] = sc.tol.tau;
  r.body["payment_lower_bound"] = {{"value", pb.value}, {"argmin", type_json(pb.argmin)}};
  if (sc.ordeal_cap) {
    const NonlinearUtilitySpec nl = sc.nonlinear();
    const SlopeBound sb = slope_bound_M(nl, sc.space, nl.q_bar);
    r.body["slope_bound"] = {{"m", sb.m}, {"raw", sb.raw}, {"safety", sb.safety}};
  }
  const auto grad = field.gradient_field();
  const bool slopes = sc.ordeal_cap.has_value();
  const NonlinearUtilitySpec nl = sc.nonlinear();
  const std::vector<Bundle> b = m.sample(grid);
  Csv csv({"alpha", "beta", "x", "grad_alpha", "grad_beta", "local_violation", "iso_merit_slope",
           "s_mrs"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Type t = grid.node(i);
    const double s = slopes ? iso_slope(nl, t, b[i].x, std::min(b[i].q, nl.q_bar)).slope
                            : std::nan("");
    csv.row(std::vector<double>{t.alpha, t.beta, field.values()[i], grad[i].first,
                                grad[i].second, v.local[i], sc.merit.iso_slope(t), s});
  }
  r.csv.emplace_back("score_field.csv", csv.str());
  return r;
}

Report cmd_compare(const Scenario& sc, const CommandSpec&) {
  const NonlinearUtilitySpec nl = require_ordeal_cap(sc, "compare");
  const Type anchor = sc.mechanism.anchor.value_or(default_anchor(sc));
  Report r;
  r.body["anchor"] = type_json(anchor);
  r.body["x_b"] = sc.mechanism.x_b;
  try {
    const ComparisonReport c =
        compare_instruments(nl, sc.merit, sc.grid(), anchor, sc.mechanism.x_b, sc.tol.tau);
    r.body["applicable"] = true;
    r.body["slope_bound"] = {{"m", c.bound.m}, {"raw", c.bound.raw}, {"safety", c.bound.safety}};
    r.body["payment_lower_bound"] = c.payment_bound.value;
    r.body["ordeal_violation"] = number(c.ordeal_violation);
    r.body["ordeal_witness"] = {{"type", type_json(c.violations.witness)},
                                {"on_jump_curve", c.violations.witness_on_jump}};
    r.body["q_b"] = c.q_b;
    r.body["resolution"] = c.violations.resolution;
    r.body["verdict"] = c.verdict;
    r.pass = c.verdict;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotApplicable) throw;
    r.body["applicable"] = false;
    r.body["error"] = error_code_name(e.code());
    r.body["reason"] = e.what();
    r.pass = false;
  }
  return r;
}

Report cmd_export(const Scenario& sc, const CommandSpec&) {
  const Mechanism m = build_mechanism(sc);
  Report r;
  r.body["mechanism"] = mechanism_json(m);
  r.body["grid"] = {{"n_alpha", sc.n_alpha}, {"n_beta", sc.n_beta}};
  r.csv.emplace_back("mechanism.csv", mechanism_csv(sc, m));
  if (const auto* t = m.get<ThresholdMechanism>()) {
    const ThresholdCurve& c = t->curve();
    Csv csv({"lambda", "kappa_star", "d1", "d2"});
    for (std::size_t i = 0; i < c.size(); ++i) {
      csv.row(std::vector<double>{c.lambda()[i], c.kappa()[i], c.d1()[i], c.d2()[i]});
    }
    r.csv.emplace_back("threshold_curve.csv", csv.str());
  }
  return r;
}

}  // namespace detail
}  // namespace mechlab::cli
