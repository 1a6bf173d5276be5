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

#include "mechlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "mechlab/error.hpp"

namespace mechlab {

std::string_view side_name(Side side) { return side == Side::kLow ? "low" : "high"; }

std::string_view instrument_name(Instrument instrument) {
  return instrument == Instrument::kPayments ? "payments" : "ordeals";
}

std::string_view mechanism_kind_name(MechanismSettings::Kind kind) {
  switch (kind) {
    case MechanismSettings::Kind::kThreshold: return "threshold";
    case MechanismSettings::Kind::kMixture: return "mixture";
    case MechanismSettings::Kind::kConditional: return "conditional";
    case MechanismSettings::Kind::kKnifeEdge: return "knife_edge";
    case MechanismSettings::Kind::kOneStep: return "one_step";
    case MechanismSettings::Kind::kPaymentScreen: return "payment_screen";
  }
  return "unknown";
}

const LinearUtilitySpec& Scenario::linear() const {
  if (const auto* spec = std::get_if<LinearUtilitySpec>(&utility)) return *spec;
  throw Error(ErrorCode::kInvalidArgument, "scenario utility is not linear");
}

NonlinearUtilitySpec Scenario::nonlinear() const {
  if (const auto* spec = std::get_if<NonlinearUtilitySpec>(&utility)) return *spec;
  return as_nonlinear(std::get<LinearUtilitySpec>(utility), ordeal_cap.value_or(1.0));
}

namespace {

struct Entry {
  std::string value;
  std::string where;  // "line N" or "override N"
};

using Table = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"domain", {"alpha_lo", "alpha_hi", "beta_lo", "beta_hi"}},
      {"utility", {"kind", "w", "z", "v_shape", "w_shape", "z_shape", "q_bar"}},
      {"merit", {"eta"}},
      {"grid", {"n_alpha", "n_beta"}},
      {"tolerances",
       {"ic", "ir", "equity", "tau", "margin", "curve_samples", "equity_bins",
        "convexity_trials"}},
      {"mechanism",
       {"kind", "threshold", "side", "allocation", "knots", "components", "instrument",
        "knife_q", "anchor", "x_b", "screen_center", "screen_width"}},
      {"probe", {"n_alpha", "n_beta", "classes"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

void put(Table& table, const std::string& section, const std::string& key,
         std::string value, const std::string& where) {
  const auto& keys = known_keys();
  const auto sec = keys.find(section);
  if (sec == keys.end()) fail(where, "unknown section [" + section + "]");
  if (std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end()) {
    fail(where, "unknown key '" + key + "' in [" + section + "]");
  }
  table[section][key] = Entry{std::move(value), where};
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(where, "expected a number, got '" + tok + "'");
  return v;
}

std::size_t to_count(const std::string& tok, const std::string& where) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(where, "expected a non-negative integer, got '" + tok + "'");
  }
  return v;
}

class Reader {
 public:
  explicit Reader(const Table& table) : table_(table) {}

  const Entry* get(const std::string& section, const std::string& key) const {
    const auto s = table_.find(section);
    if (s == table_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (const Entry* e = get(section, key)) out = to_double(trim(e->value), e->where);
  }

  void count(const std::string& section, const std::string& key, std::size_t& out) const {
    if (const Entry* e = get(section, key)) out = to_count(trim(e->value), e->where);
  }

 private:
  const Table& table_;
};

ScalarFamily parse_scalar_family(const Entry& e) {
  const auto tok = split_ws(e.value);
  if (tok.empty()) fail(e.where, "missing family name");
  std::vector<double> p;
  for (std::size_t i = 1; i < tok.size(); ++i) p.push_back(to_double(tok[i], e.where));
  auto need = [&](std::size_t n) {
    if (p.size() != n) {
      fail(e.where, "family '" + tok[0] + "' takes " + std::to_string(n) + " parameters");
    }
  };
  try {
    if (tok[0] == "exponential") {
      need(2);
      return ScalarFamily::exponential(p[0], p[1]);
    }
    if (tok[0] == "power") {
      need(3);
      return ScalarFamily::power(p[0], p[1], p[2]);
    }
    if (tok[0] == "affine") {
      need(2);
      return ScalarFamily::affine(p[0], p[1]);
    }
  } catch (const Error& err) {
    throw Error(err.code(), e.where + ": " + err.what());
  }
  fail(e.where, "unknown weight family '" + tok[0] + "'");
}

ShapeFamily parse_shape(const Entry& e) {
  const auto tok = split_ws(e.value);
  if (tok.empty()) fail(e.where, "missing shape name");
  if (tok[0] == "identity") {
    if (tok.size() != 1) fail(e.where, "identity takes no parameters");
    return ShapeFamily::identity();
  }
  if (tok.size() != 2) fail(e.where, "shape '" + tok[0] + "' takes 1 parameter");
  const double c = to_double(tok[1], e.where);
  try {
    if (tok[0] == "log1p") return ShapeFamily::log1p(c);
    if (tok[0] == "quadratic") return ShapeFamily::quadratic(c);
    if (tok[0] == "expm1") return ShapeFamily::expm1(c);
  } catch (const Error& err) {
    throw Error(err.code(), e.where + ": " + err.what());
  }
  fail(e.where, "unknown shape '" + tok[0] + "'");
}

MeritFunction parse_merit(const Entry& e) {
  const auto tok = split_ws(e.value);
  if (tok.empty()) fail(e.where, "missing merit family");
  std::vector<double> p;
  for (std::size_t i = 1; i < tok.size(); ++i) p.push_back(to_double(tok[i], e.where));
  if (tok[0] == "weighted_sum") {
    if (p.size() != 2) fail(e.where, "weighted_sum takes 2 parameters");
    return MeritFunction::weighted_sum(p[0], p[1]);
  }
  if (tok[0] == "product") {
    if (p.size() != 1) fail(e.where, "product takes 1 parameter");
    return MeritFunction::product(p[0]);
  }
  fail(e.where, "unknown merit family '" + tok[0] + "'");
}

Scenario interpret(const Table& table) {
  const Reader r(table);
  Scenario sc;

  double alo = sc.space.alpha_lo(), ahi = sc.space.alpha_hi();
  double blo = sc.space.beta_lo(), bhi = sc.space.beta_hi();
  r.number("domain", "alpha_lo", alo);
  r.number("domain", "alpha_hi", ahi);
  r.number("domain", "beta_lo", blo);
  r.number("domain", "beta_hi", bhi);
  try {
    sc.space = TypeSpace(alo, ahi, blo, bhi);
  } catch (const Error& err) {
    const Entry* e = r.get("domain", "alpha_lo");
    throw Error(err.code(), (e ? e->where + ": " : std::string()) + err.what());
  }

  std::string kind = "linear";
  if (const Entry* e = r.get("utility", "kind")) kind = trim(e->value);
  if (const Entry* e = r.get("utility", "q_bar")) {
    const double cap = to_double(trim(e->value), e->where);
    if (!(cap > 0.0)) fail(e->where, "q_bar must be positive");
    sc.ordeal_cap = cap;
  }
  ScalarFamily w = ScalarFamily::exponential(1.0, 1.0);
  ScalarFamily z = ScalarFamily::exponential(1.0, -1.0);
  if (const Entry* e = r.get("utility", "w")) w = parse_scalar_family(*e);
  if (const Entry* e = r.get("utility", "z")) z = parse_scalar_family(*e);
  if (kind == "linear") {
    for (const char* key : {"v_shape", "w_shape", "z_shape"}) {
      if (const Entry* e = r.get("utility", key)) {
        fail(e->where, std::string(key) + " is only valid for kind = nonlinear");
      }
    }
    sc.utility = LinearUtilitySpec{w, z};
  } else if (kind == "nonlinear") {
    NonlinearUtilitySpec nl = as_nonlinear(LinearUtilitySpec{w, z}, 1.0);
    if (const Entry* e = r.get("utility", "v_shape")) nl.v_shape = parse_shape(*e);
    if (const Entry* e = r.get("utility", "w_shape")) nl.w_shape = parse_shape(*e);
    if (const Entry* e = r.get("utility", "z_shape")) nl.z_shape = parse_shape(*e);
    if (!sc.ordeal_cap) {
      const Entry* e = r.get("utility", "kind");
      fail(e ? e->where : "[utility]", "nonlinear utility needs q_bar");
    }
    nl.q_bar = *sc.ordeal_cap;
    sc.utility = nl;
  } else {
    const Entry* e = r.get("utility", "kind");
    fail(e->where, "utility kind must be linear or nonlinear, got '" + kind + "'");
  }

  if (const Entry* e = r.get("merit", "eta")) sc.merit = parse_merit(*e);

  r.count("grid", "n_alpha", sc.n_alpha);
  r.count("grid", "n_beta", sc.n_beta);
  for (const char* key : {"n_alpha", "n_beta"}) {
    const Entry* e = r.get("grid", key);
    if (e && to_count(trim(e->value), e->where) < 2) fail(e->where, "grid needs >= 2 nodes");
  }

  r.number("tolerances", "ic", sc.tol.ic);
  r.number("tolerances", "ir", sc.tol.ir);
  r.number("tolerances", "equity", sc.tol.equity);
  r.number("tolerances", "tau", sc.tol.tau);
  r.number("tolerances", "margin", sc.tol.margin);
  r.count("tolerances", "curve_samples", sc.tol.curve_samples);
  r.count("tolerances", "equity_bins", sc.tol.equity_bins);
  r.count("tolerances", "convexity_trials", sc.tol.convexity_trials);
  if (const Entry* e = r.get("tolerances", "curve_samples");
      e && sc.tol.curve_samples < 101) {
    fail(e->where, "curve_samples must be >= 101");
  }

  MechanismSettings& m = sc.mechanism;
  if (const Entry* e = r.get("mechanism", "kind")) {
    const std::string v = trim(e->value);
    using K = MechanismSettings::Kind;
    bool found = false;
    for (K k : {K::kThreshold, K::kMixture, K::kConditional, K::kKnifeEdge, K::kOneStep,
                K::kPaymentScreen}) {
      if (v == mechanism_kind_name(k)) {
        m.kind = k;
        found = true;
      }
    }
    if (!found) fail(e->where, "unknown mechanism kind '" + v + "'");
  }
  if (const Entry* e = r.get("mechanism", "threshold")) {
    m.threshold = to_double(trim(e->value), e->where);
  }
  if (const Entry* e = r.get("mechanism", "side")) {
    const std::string v = trim(e->value);
    if (v == "low") m.side = Side::kLow;
    else if (v == "high") m.side = Side::kHigh;
    else fail(e->where, "side must be low or high");
  }
  if (const Entry* e = r.get("mechanism", "allocation")) {
    const std::string v = trim(e->value);
    if (v == "linear") m.allocation.kind = AllocationSpec::Kind::kLinear;
    else if (v == "step") m.allocation.kind = AllocationSpec::Kind::kStep;
    else fail(e->where, "allocation must be linear or step");
  }
  if (const Entry* e = r.get("mechanism", "knots")) {
    for (const std::string& tok : split_ws(e->value)) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) fail(e->where, "knot '" + tok + "' is not eta:x");
      m.allocation.knots.emplace_back(to_double(tok.substr(0, colon), e->where),
                                      to_double(tok.substr(colon + 1), e->where));
    }
  }
  r.count("mechanism", "components", m.components);
  if (const Entry* e = r.get("mechanism", "instrument")) {
    const std::string v = trim(e->value);
    if (v == "payments") m.instrument = Instrument::kPayments;
    else if (v == "ordeals") m.instrument = Instrument::kOrdeals;
    else fail(e->where, "instrument must be payments or ordeals");
  }
  r.number("mechanism", "knife_q", m.knife_q);
  if (const Entry* e = r.get("mechanism", "anchor")) {
    const auto tok = split_ws(e->value);
    if (tok.size() != 2) fail(e->where, "anchor takes 'alpha beta'");
    m.anchor = Type{to_double(tok[0], e->where), to_double(tok[1], e->where)};
  }
  r.number("mechanism", "x_b", m.x_b);
  r.number("mechanism", "screen_center", m.screen_center);
  r.number("mechanism", "screen_width", m.screen_width);
  r.count("probe", "n_alpha", m.probe_n_alpha);
  r.count("probe", "n_beta", m.probe_n_beta);
  r.count("probe", "classes", m.probe_classes);
  return sc;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
  Table table;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!known_keys().contains(section)) fail(where, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    if (section.empty()) fail(where, "key outside of any section");
    put(table, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  for (std::size_t i = 0; i < overrides.size(); ++i) {
    const std::string where = "override " + std::to_string(i + 1);
    const std::string& o = overrides[i];
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      fail(where, "expected section.key=value, got '" + o + "'");
    }
    put(table, trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)),
        trim(o.substr(eq + 1)), where);
  }
  return interpret(table);
}

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

// --------------------------------------------------------------- validation

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.pass; });
}

const ValidationCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

constexpr int kSample = 64;

// Samples the closed rectangle on a kSample x kSample lattice.
template <typename Pred>
ValidationCheck sample_check(const TypeSpace& space, std::string name, Pred pred) {
  ValidationCheck check{std::move(name), true, "", std::nullopt};
  for (int i = 0; i <= kSample && check.pass; ++i) {
    for (int j = 0; j <= kSample; ++j) {
      const Type t{space.alpha_lo() + (space.alpha_hi() - space.alpha_lo()) * i / kSample,
                   space.beta_lo() + (space.beta_hi() - space.beta_lo()) * j / kSample};
      if (!pred(t)) {
        check.pass = false;
        check.witness = t;
        break;
      }
    }
  }
  check.detail = check.pass ? "holds on a 65x65 sample of the closed rectangle"
                            : "violated at the witness point";
  return check;
}

void check_family_domain(const ScalarFamily& f, const TypeSpace& space, const char* name) {
  if (const auto lo = f.domain_lo(); lo && !(space.alpha_lo() > *lo)) {
    throw Error(ErrorCode::kMalformedScenario,
                std::string(name) + " = " + f.describe() +
                    " is undefined on part of the alpha range");
  }
}

ValidationCheck assumption_limits(const ScalarFamily& w, const ScalarFamily& z) {
  ValidationCheck c{"z/w limits", false, "", std::nullopt};
  if (!w.defined_on_reals() || !z.defined_on_reals()) {
    c.detail = "w and z must both be defined and positive on all of R";
    return c;
  }
  // a_z e^{b_z a} / (a_w e^{b_w a}): the limits hold iff b_z - b_w < 0.
  const double rate = z.param(1) - w.param(1);
  c.pass = rate < 0.0;
  c.detail = c.pass ? "z/w -> 0 as alpha -> inf and -> inf as alpha -> -inf"
                    : "z/w does not vanish as alpha -> inf";
  return c;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  const TypeSpace& s = sc.space;

  auto add_weight_checks = [&](const ScalarFamily& w, const ScalarFamily& z) {
    check_family_domain(w, s, "w");
    check_family_domain(z, s, "z");
    rep.checks.push_back(sample_check(s, "w>0", [&](Type t) { return w.value(t.alpha) > 0; }));
    rep.checks.push_back(sample_check(s, "z>0", [&](Type t) { return z.value(t.alpha) > 0; }));
    rep.checks.push_back(sample_check(s, "w'>0", [&](Type t) { return w.d1(t.alpha) > 0; }));
    rep.checks.push_back(sample_check(s, "z'<0", [&](Type t) { return z.d1(t.alpha) < 0; }));
    rep.checks.push_back(assumption_limits(w, z));
  };

  if (const auto* lin = std::get_if<LinearUtilitySpec>(&sc.utility)) {
    add_weight_checks(lin->w, lin->z);
  } else {
    const auto& nl = std::get<NonlinearUtilitySpec>(sc.utility);
    add_weight_checks(nl.w_weight, nl.z_weight);
    const double q_bar = nl.q_bar;
    // Levels sampled on [0,1] for x and [0,q_bar] for q and p.
    auto levels = [](double hi) {
      std::vector<double> out;
      for (int k = 0; k <= 16; ++k) out.push_back(hi * k / 16.0);
      return out;
    };
    auto level_check = [&](std::string name, double hi, auto pred) {
      const auto lv = levels(hi);
      return sample_check(s, std::move(name), [&](Type t) {
        return std::all_of(lv.begin(), lv.end(), [&](double l) { return pred(t, l); });
      });
    };
    rep.checks.push_back(level_check("v_x>0", 1.0, [&](Type t, double x) { return nl.v_x(t.beta, x) > 0; }));
    rep.checks.push_back(level_check("w_p>0", q_bar, [&](Type t, double p) { return nl.w_p(t.alpha, p) > 0; }));
    rep.checks.push_back(level_check("z_q>0", q_bar, [&](Type t, double q) { return nl.z_q(t.alpha, q) > 0; }));
    rep.checks.push_back(level_check("v_beta_x>0", 1.0, [&](Type t, double x) { return nl.v_beta_x(t.beta, x) > 0; }));
    rep.checks.push_back(level_check("w_alpha_p>0", q_bar, [&](Type t, double p) { return nl.w_alpha_p(t.alpha, p) > 0; }));
    rep.checks.push_back(level_check("z_alpha_q<0", q_bar, [&](Type t, double q) { return nl.z_alpha_q(t.alpha, q) < 0; }));
    rep.checks.push_back(sample_check(s, "zero at origin", [&](Type t) {
      return nl.v(t.beta, 0.0) == 0.0 && nl.w(t.alpha, 0.0) == 0.0 && nl.z(t.alpha, 0.0) == 0.0;
    }));
  }

  const MeritFunction& m = sc.merit;
  rep.checks.push_back(sample_check(s, "eta_alpha>0", [&](Type t) { return m.eta_alpha(t) > 0; }));
  rep.checks.push_back(sample_check(s, "eta_beta>0", [&](Type t) { return m.eta_beta(t) > 0; }));

  rep.min_eta_alpha = std::numeric_limits<double>::infinity();
  rep.min_eta_beta = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSample; ++i) {
    for (int j = 0; j <= kSample; ++j) {
      const Type t{s.alpha_lo() + (s.alpha_hi() - s.alpha_lo()) * i / kSample,
                   s.beta_lo() + (s.beta_hi() - s.beta_lo()) * j / kSample};
      rep.min_eta_alpha = std::min(rep.min_eta_alpha, m.eta_alpha(t));
      rep.min_eta_beta = std::min(rep.min_eta_beta, m.eta_beta(t));
    }
  }
  rep.merit_range = merit_range(m, s);
  return rep;
}

}  // namespace mechlab
