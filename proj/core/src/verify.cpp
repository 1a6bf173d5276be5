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

#include "mechlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>

#include "mechlab/contour.hpp"
#include "mechlab/error.hpp"
#include "mechlab/reparam.hpp"

namespace mechlab {
namespace {

struct Gain {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t source = 0;
  std::size_t target = 0;
};

// Row-major order: a later candidate replaces the current best only when
// strictly larger, so merging chunks in source order keeps the lowest index.
void merge(Gain& best, const Gain& g) {
  if (g.value > best.value) best = g;
}

template <typename UtilityAt>
Gain scan_sources(const Grid& grid, const std::vector<Bundle>& bundles, ICScope scope,
                  std::size_t begin, std::size_t end, UtilityAt&& u, std::size_t& pairs) {
  Gain best;
  const std::size_t nb = grid.n_beta();
  for (std::size_t s = begin; s < end; ++s) {
    const double own = u(s, bundles[s]);
    std::size_t lo = 0, hi = grid.size();
    if (scope == ICScope::kSameAlpha) {
      lo = (s / nb) * nb;
      hi = lo + nb;
    }
    for (std::size_t t = lo; t < hi; ++t) {
      const double g = u(s, bundles[t]) - own;
      if (g > best.value) best = {g, s, t};
    }
    pairs += hi - lo;
  }
  return best;
}

}  // namespace

ICReport check_ic(const UtilityModel& utility, const Grid& grid,
                  const std::vector<Bundle>& bundles, double epsilon, ICScope scope,
                  unsigned threads) {
  if (bundles.size() != grid.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bundle count does not match the grid");
  }
  const std::vector<Type> nodes = grid.nodes();
  std::vector<double> beta(nodes.size()), wa(nodes.size()), za(nodes.size());
  const auto* lin = std::get_if<LinearUtilitySpec>(&utility);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    beta[i] = nodes[i].beta;
    if (lin) {
      wa[i] = lin->w.value(nodes[i].alpha);
      za[i] = lin->z.value(nodes[i].alpha);
    }
  }
  auto u = [&](std::size_t s, const Bundle& b) {
    if (lin) return beta[s] * b.x - wa[s] * b.p - za[s] * b.q;
    return eval_utility(utility, nodes[s], b);
  };

  const std::size_t n = grid.size();
  const std::size_t n_threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  std::vector<Gain> partial(n_threads);
  std::vector<std::size_t> pairs(n_threads, 0);
  auto work = [&](std::size_t k) {
    const std::size_t b = n * k / n_threads, e = n * (k + 1) / n_threads;
    partial[k] = scan_sources(grid, bundles, scope, b, e, u, pairs[k]);
  };
  if (n_threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }
  Gain best;
  for (const auto& g : partial) merge(best, g);

  ICReport r;
  r.max_gain = std::max(best.value, 0.0);
  r.source = best.source;
  r.target = best.target;
  r.source_type = nodes[best.source];
  r.target_type = nodes[best.target];
  r.n_pairs = std::accumulate(pairs.begin(), pairs.end(), std::size_t{0});
  r.epsilon = epsilon;
  r.scope = scope;
  r.pass = r.max_gain <= epsilon;
  return r;
}

ICReport check_ic(const Mechanism& mech, const Grid& grid, double epsilon, ICScope scope,
                  unsigned threads) {
  return check_ic(mech.utility(), grid, mech.sample(grid), epsilon, scope, threads);
}

IRReport check_ir(const UtilityModel& utility, const Grid& grid,
                  const std::vector<Bundle>& bundles, double tolerance) {
  if (bundles.size() != grid.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bundle count does not match the grid");
  }
  IRReport r;
  r.min_utility = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = eval_utility(utility, grid.node(i), bundles[i]);
    if (u < r.min_utility) {
      r.min_utility = u;
      r.node = i;
    }
  }
  r.witness = grid.node(r.node);
  r.tolerance = tolerance;
  r.pass = r.min_utility >= -tolerance;
  return r;
}

IRReport check_ir(const Mechanism& mech, const Grid& grid, double tolerance) {
  return check_ir(mech.utility(), grid, mech.sample(grid), tolerance);
}

namespace {

// Max spread of x over groups of points; updates the report in place.
void spread_over(const std::vector<Type>& pts, const std::vector<double>& x, EquityReport& r) {
  if (pts.empty()) return;
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  const double s = *mx - *mn;
  if (s > r.max_spread) {
    r.max_spread = s;
    r.witness_a = pts[static_cast<std::size_t>(mn - x.begin())];
    r.witness_b = pts[static_cast<std::size_t>(mx - x.begin())];
  }
  r.n_samples += pts.size();
}

}  // namespace

EquityReport check_equity(const Mechanism& mech, const MeritFunction& merit, const Grid& grid,
                          std::size_t n_bins, double tolerance) {
  if (n_bins < 1) throw Error(ErrorCode::kInvalidArgument, "n_bins must be >= 1");
  EquityReport r;
  r.bins = n_bins;
  r.tolerance = tolerance;
  const MeritRange range = merit_range(merit, grid.space());
  const double span = range.hi - range.lo;

  if (mech.merit_measurable() && mech.closed_form()) {
    r.exact = true;
    // Golden-ratio offsets keep the traced levels away from rational
    // threshold placements.
    constexpr double kPhi = 0.6180339887498949;
    constexpr std::size_t kPerContour = 64;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double level = range.lo + (static_cast<double>(k) + kPhi) * span / n_bins;
      const Contour c = trace_iso_merit(merit, level, grid.space());
      std::vector<Type> pts = sample_contour(c, kPerContour + 2);
      if (pts.size() > 2) pts = std::vector<Type>(pts.begin() + 1, pts.end() - 1);
      std::vector<double> x;
      x.reserve(pts.size());
      for (const Type& t : pts) x.push_back(mech.allocation_at(t));
      spread_over(pts, x, r);
    }
  } else {
    const std::vector<Bundle> b = mech.sample(grid);
    const std::vector<Type> nodes = grid.nodes();
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> eta(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) eta[i] = merit.eta(nodes[i]);
    std::vector<std::size_t> key(nodes.size());
    if (mech.merit_measurable()) {
      r.exact = true;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t c) { return eta[a] < eta[c]; });
      const double tol = 1e-12 * std::max(1.0, std::abs(range.hi));
      std::size_t g = 0;
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && eta[order[k]] - eta[order[k - 1]] > tol) ++g;
        key[order[k]] = g;
      }
    } else {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double f = span > 0.0 ? (eta[i] - range.lo) / span : 0.0;
        key[i] = std::min(n_bins - 1, static_cast<std::size_t>(std::max(0.0, f) * n_bins));
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t c) { return key[a] < key[c]; });
    }
    std::size_t k = 0;
    while (k < order.size()) {
      std::size_t e = k;
      std::vector<Type> pts;
      std::vector<double> x;
      while (e < order.size() && key[order[e]] == key[order[k]]) {
        pts.push_back(nodes[order[e]]);
        x.push_back(b[order[e]].x);
        ++e;
      }
      spread_over(pts, x, r);
      k = e;
    }
  }
  r.pass = r.max_spread <= tolerance;
  return r;
}

MonotonicityReport check_merit_monotone(const Mechanism& mech, const MeritFunction& merit,
                                        const Grid& grid, double tolerance,
                                        std::size_t n_bins) {
  const EquityReport eq = check_equity(mech, merit, grid, n_bins, tolerance);
  if (!eq.pass) {
    throw Error(ErrorCode::kNotEquitable,
                "allocation spread " + std::to_string(eq.max_spread) +
                    " within a merit class exceeds " + std::to_string(tolerance));
  }
  const std::vector<Bundle> b = mech.sample(grid);
  const std::vector<Type> nodes = grid.nodes();
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    return merit.eta(nodes[a]) < merit.eta(nodes[c]);
  });
  MonotonicityReport r;
  r.tolerance = tolerance;
  // Largest drop from the running maximum catches non-adjacent violations.
  std::size_t arg_max = order.empty() ? 0 : order.front();
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t cur = order[k];
    const double drop = b[arg_max].x - b[cur].x;
    if (drop > r.worst_drop) {
      r.worst_drop = drop;
      r.witness_lo = nodes[arg_max];
      r.witness_hi = nodes[cur];
    }
    if (b[cur].x > b[arg_max].x) arg_max = cur;
  }
  r.pass = r.worst_drop <= tolerance;
  return r;
}

ConvexityReport check_convexity(const ThresholdMechanism& mech, std::size_t n_trials,
                                std::uint64_t seed, double tolerance) {
  const ReparamRectangle& rect = mech.rectangle();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uk(rect.kappa_lo, rect.kappa_hi);
  std::uniform_real_distribution<double> ul(rect.lambda_lo, rect.lambda_hi);
  auto draw = [&] {
    const double k = uk(rng);
    return KL{k, ul(rng)};
  };
  ConvexityReport r;
  r.n_trials = n_trials;
  r.tolerance = tolerance;
  r.min_midpoint_defect = std::numeric_limits<double>::infinity();
  r.min_subgradient_defect = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_trials; ++i) {
    const KL a = draw();
    const KL b = draw();
    const KL mid{0.5 * (a.kappa + b.kappa), 0.5 * (a.lambda + b.lambda)};
    const double va = mech.indirect_utility(a);
    const double vb = mech.indirect_utility(b);
    const double md = 0.5 * (va + vb) - mech.indirect_utility(mid);
    if (md < r.min_midpoint_defect) {
      r.min_midpoint_defect = md;
      r.midpoint_witness_a = a;
      r.midpoint_witness_b = b;
    }
    const double sd = vb - va - mech.allocation_kl(a) * (b.kappa - a.kappa) -
                      mech.ordeal_kl(a) * (b.lambda - a.lambda);
    if (sd < r.min_subgradient_defect) {
      r.min_subgradient_defect = sd;
      r.subgradient_witness_a = a;
      r.subgradient_witness_b = b;
    }
  }
  if (n_trials == 0) r.min_midpoint_defect = r.min_subgradient_defect = 0.0;
  r.pass = r.min_midpoint_defect >= -tolerance && r.min_subgradient_defect >= -tolerance;
  return r;
}

ProbeProblem make_probe_problem(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                const Grid& grid, Instrument instrument, std::size_t n_levels,
                                const ProbeOptions& options) {
  if (grid.n_alpha() > 12 || grid.n_beta() > 12) {
    throw Error(ErrorCode::kInvalidArgument, "probe grids are limited to 12 x 12");
  }
  struct Member {
    Type type;
    std::size_t cls;
  };
  std::vector<Member> members;
  std::size_t n_cls = 0;
  const std::vector<Type> nodes = grid.nodes();
  if (options.couple_equity) {
    if (n_levels < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one merit class");
    const MeritRange range = merit_range(merit, grid.space());
    const double width = (range.hi - range.lo) / static_cast<double>(n_levels);
    for (const Type& t : nodes) {
      const double f = (merit.eta(t) - range.lo) / width;
      members.push_back(
          {t, std::min(n_levels - 1, static_cast<std::size_t>(std::max(0.0, f)))});
    }
    if (options.class_boundaries) {
      for (std::size_t m = 1; m < n_levels; ++m) {
        const double level = range.lo + width * static_cast<double>(m);
        const Contour c = trace_iso_merit(merit, level, grid.space());
        for (const Type& t : sample_contour(c, std::max<std::size_t>(options.boundary_points, 2))) {
          members.push_back({t, m - 1});
          members.push_back({t, m});
        }
      }
    }
    // Drop empty classes, keeping merit order.
    std::vector<std::size_t> count(n_levels, 0), remap(n_levels, 0);
    for (const auto& mb : members) ++count[mb.cls];
    for (std::size_t m = 0; m < n_levels; ++m) {
      remap[m] = n_cls;
      if (count[m] > 0) ++n_cls;
    }
    for (auto& mb : members) mb.cls = remap[mb.cls];
  } else {
    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return merit.eta(nodes[a]) < merit.eta(nodes[b]);
    });
    for (std::size_t k = 0; k < order.size(); ++k) members.push_back({nodes[order[k]], k});
    n_cls = nodes.size();
  }

  ProbeProblem pp;
  pp.n_classes = n_cls;
  pp.n_types = members.size();
  pp.class_merit.assign(n_cls, 0.0);
  std::vector<std::size_t> cnt(n_cls, 0);
  for (const auto& mb : members) {
    pp.class_merit[mb.cls] += merit.eta(mb.type);
    ++cnt[mb.cls];
  }
  for (std::size_t m = 0; m < n_cls; ++m) pp.class_merit[m] /= static_cast<double>(cnt[m]);

  LinearProgram& lp = pp.lp;
  const std::size_t nv = 2 * n_cls;
  lp.n_vars = nv;
  lp.objective.assign(nv, 0.0);
  lp.free.assign(nv, false);
  if (instrument == Instrument::kPayments) {
    for (std::size_t m = 0; m < n_cls; ++m) lp.free[n_cls + m] = true;
  }
  for (const auto& mb : members) {
    const double beta = mb.type.beta;
    const double c = instrument == Instrument::kPayments ? spec.w.value(mb.type.alpha)
                                                         : spec.z.value(mb.type.alpha);
    const std::size_t m = mb.cls;
    for (std::size_t o = 0; o < n_cls; ++o) {
      if (o == m) continue;
      std::vector<double> row(nv, 0.0);
      row[o] = beta;
      row[n_cls + o] = -c;
      row[m] = -beta;
      row[n_cls + m] = c;
      lp.add_row(std::move(row), 0.0);
    }
    std::vector<double> ir(nv, 0.0);
    ir[m] = -beta;
    ir[n_cls + m] = c;
    lp.add_row(std::move(ir), 0.0);
  }
  for (std::size_t m = 0; m < n_cls; ++m) {
    std::vector<double> row(nv, 0.0);
    row[m] = 1.0;
    lp.add_row(std::move(row), 1.0);
  }
  return pp;
}

ProbeResult probe_single_instrument(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                    const Grid& grid, Instrument instrument,
                                    std::size_t n_levels, const ProbeOptions& options) {
  ProbeProblem pp = make_probe_problem(spec, merit, grid, instrument, n_levels, options);
  const std::size_t nc = pp.n_classes;
  ProbeResult r;
  r.instrument = instrument;
  r.n_classes = nc;
  r.n_types = pp.n_types;
  r.n_constraints = pp.lp.rows.size();
  r.class_merit = pp.class_merit;
  std::vector<double> best_y(2 * nc, 0.0);
  double best = 0.0;
  bool done = false;
  // Most distant classes first: a separating menu shows up there earliest.
  for (std::size_t d = nc > 0 ? nc - 1 : 0; d >= 1 && !done; --d) {
    for (std::size_t lo = 0; lo + d < nc && !done; ++lo) {
      for (const auto& [a, b] : {std::pair{lo + d, lo}, std::pair{lo, lo + d}}) {
        LinearProgram lp = pp.lp;
        lp.objective[a] = 1.0;
        lp.objective[b] = -1.0;
        const LPSolution s = solve_lp(lp);
        ++r.lps_solved;
        if (s.status != LPSolution::Status::kOptimal) {
          throw Error(ErrorCode::kSolverFailure, "probe LP did not reach an optimum");
        }
        if (s.value > best) {
          best = s.value;
          best_y = s.y;
          r.argmax_hi = a;
          r.argmax_lo = b;
        }
        if (best >= 1.0 - 1e-12) {
          done = true;
          break;
        }
      }
    }
  }
  r.max_equitable_spread = std::max(best, 0.0);
  r.x.assign(best_y.begin(), best_y.begin() + static_cast<std::ptrdiff_t>(nc));
  r.t.assign(best_y.begin() + static_cast<std::ptrdiff_t>(nc), best_y.end());
  double slack = -max_violation(pp.lp, best_y);
  for (std::size_t m = 0; m < nc; ++m) {
    slack = std::min(slack, r.x[m]);
    if (instrument == Instrument::kOrdeals) slack = std::min(slack, r.t[m]);
  }
  r.min_slack = slack;
  if (slack < -1e-9) {
    throw Error(ErrorCode::kSolverFailure,
                "probe certificate violates a constraint by " + std::to_string(-slack));
  }
  return r;
}

namespace {

template <typename R>
KnifeEdgeResult ratio_along(const MeritFunction& merit, const TypeSpace& space,
                            double eta_star, std::size_t n_samples, R&& ratio,
                            bool relative_to_max) {
  const MeritRange range = merit_range(merit, space);
  if (!(eta_star > range.lo && eta_star < range.hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "eta* = " + std::to_string(eta_star) + " must lie strictly inside (" +
                    std::to_string(range.lo) + ", " + std::to_string(range.hi) + ")");
  }
  if (n_samples < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two samples");
  const Contour c = trace_iso_merit(merit, eta_star, space);
  KnifeEdgeResult r;
  r.escaped = c.escaped;
  r.r_min = std::numeric_limits<double>::infinity();
  r.r_max = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const Type& t : sample_contour(c, n_samples)) {
    const auto [v, s] = ratio(t);
    r.r_min = std::min(r.r_min, v);
    r.r_max = std::max(r.r_max, v);
    scale = std::max(scale, s);
    ++r.n_samples;
  }
  if (r.n_samples == 0) return r;
  if (relative_to_max) scale = std::abs(r.r_max);
  r.dispersion = scale > 0.0 ? (r.r_max - r.r_min) / scale : 0.0;
  return r;
}

}  // namespace

KnifeEdgeResult knife_edge_diagnostic(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                      const TypeSpace& space, double eta_star,
                                      std::size_t n_samples) {
  return ratio_along(
      merit, space, eta_star, n_samples,
      [&](const Type& t) { return std::pair{t.beta / spec.z.value(t.alpha), 0.0}; }, true);
}

KnifeEdgeResult knife_edge_diagnostic(const NonlinearUtilitySpec& spec,
                                      const MeritFunction& merit, const TypeSpace& space,
                                      double eta_star, double x, double q,
                                      std::size_t n_samples) {
  return ratio_along(
      merit, space, eta_star, n_samples,
      [&](const Type& t) {
        return std::pair{spec.v_x(t.beta, x) / spec.z_q(t.alpha, q), 0.0};
      },
      true);
}

KnifeEdgeResult two_point_diagnostic(const NonlinearUtilitySpec& spec,
                                     const MeritFunction& merit, const TypeSpace& space,
                                     double eta_star, const Bundle& a, const Bundle& b,
                                     std::size_t n_samples) {
  if (a.x == b.x) throw Error(ErrorCode::kInvalidArgument, "two-point menu needs x_a != x_b");
  return ratio_along(
      merit, space, eta_star, n_samples,
      [&](const Type& t) {
        const double dv = spec.v(t.beta, a.x) - spec.v(t.beta, b.x);
        const double d = dv - spec.z(t.alpha, a.q) + spec.z(t.alpha, b.q);
        return std::pair{d, std::abs(dv)};
      },
      false);
}

}  // namespace mechlab
