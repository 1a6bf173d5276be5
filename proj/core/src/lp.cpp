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

#include "mechlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mechlab/error.hpp"

namespace mechlab {
namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-11;
constexpr double kHarrisTol = 1e-9;
// Right-hand sides are loosened by up to this much (relative) to break ties.
constexpr double kPerturb = 1e-7;

struct Tableau {
  std::size_t m = 0, n = 0;  // rows, columns (excluding rhs)
  std::vector<std::vector<double>> t;
  std::vector<double> obj;  // reduced costs; obj[n] = -value
  std::vector<std::size_t> basis;
  std::vector<std::size_t> init_basis;
  std::size_t pivots = 0;

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / t[r][c];
    for (double& v : t[r]) v *= inv;
    t[r][c] = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = t[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) t[i][j] -= f * t[r][j];
      t[i][c] = 0.0;
    }
    const double f = obj[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= n; ++j) obj[j] -= f * t[r][j];
      obj[c] = 0.0;
    }
    basis[r] = c;
    ++pivots;
  }

  void set_objective(const std::vector<double>& cost) {
    obj.assign(n + 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) obj[j] = cost[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) obj[j] -= cb * t[i][j];
    }
  }

  // Dantzig pricing with the Harris two-pass ratio test: among rows whose
  // ratio is within kHarrisTol of the minimum, pivot on the largest entry.
  // Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed, std::size_t max_pivots) {
    for (;;) {
      std::size_t enter = n;
      double best_cost = kCostEps;
      for (std::size_t j = 0; j < n; ++j) {
        if (allowed[j] && obj[j] > best_cost) {
          enter = j;
          best_cost = obj[j];
        }
      }
      if (enter == n) return true;
      double theta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = t[i][enter];
        if (a > kPivotEps) theta = std::min(theta, (std::max(t[i][n], 0.0) + kHarrisTol) / a);
      }
      if (std::isinf(theta)) return false;
      std::size_t leave = m;
      double big = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double a = t[i][enter];
        if (a > kPivotEps && std::max(t[i][n], 0.0) / a <= theta && a > big) {
          big = a;
          leave = i;
        }
      }
      pivot(leave, enter);
      if (pivots > max_pivots) throw Error(ErrorCode::kSolverFailure, "simplex pivot limit");
    }
  }
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp) {
  const std::size_t nv = lp.n_vars;
  if (lp.objective.size() != nv || lp.rows.size() != lp.rhs.size() ||
      (!lp.free.empty() && lp.free.size() != nv)) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent linear program dimensions");
  }
  for (const auto& r : lp.rows) {
    if (r.size() != nv) throw Error(ErrorCode::kInvalidArgument, "row length mismatch");
  }
  // Structural columns: each free variable splits into y+ - y-.
  std::vector<std::size_t> col_of(nv), neg_col(nv, SIZE_MAX);
  std::size_t ns = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    col_of[j] = ns++;
    if (!lp.free.empty() && lp.free[j]) neg_col[j] = ns++;
  }
  const std::size_t m = lp.rows.size();
  std::size_t n_art = 0;
  for (double b : lp.rhs) n_art += b < 0.0 ? 1 : 0;
  const std::size_t slack0 = ns, art0 = ns + m, n = ns + m + n_art;

  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t.assign(m, std::vector<double>(n + 1, 0.0));
  tab.basis.assign(m, 0);
  std::size_t a = art0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
    auto& row = tab.t[i];
    for (std::size_t j = 0; j < nv; ++j) {
      row[col_of[j]] = sign * lp.rows[i][j];
      if (neg_col[j] != SIZE_MAX) row[neg_col[j]] = -sign * lp.rows[i][j];
    }
    row[slack0 + i] = sign;
    row[n] = sign * lp.rhs[i];
    if (sign < 0.0) {
      row[a] = 1.0;
      tab.basis[i] = a++;
    } else {
      tab.basis[i] = slack0 + i;
    }
  }
  tab.init_basis = tab.basis;
  // Loosen every row by a small deterministic amount so that no vertex is
  // degenerate; the final basis is re-solved against the exact rhs below.
  std::vector<double> rhs0(m);
  std::mt19937_64 rng(0x6d6563686c6162ULL);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    rhs0[i] = tab.t[i][n];
    const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
    const double eps = kPerturb * u(rng) * std::max(1.0, std::abs(lp.rhs[i]));
    if (rhs0[i] + sign * eps >= 0.0) tab.t[i][n] += sign * eps;
  }
  const std::size_t max_pivots = 50 * (n + m) + 1000;
  std::vector<bool> allowed(n, true);

  LPSolution sol;
  if (n_art > 0) {
    std::vector<double> cost(n, 0.0);
    for (std::size_t j = art0; j < n; ++j) cost[j] = -1.0;
    tab.set_objective(cost);
    tab.optimize(allowed, max_pivots);
    if (tab.obj[n] > 1e-9) {  // obj[n] = -(phase-one value) = sum of artificials
      sol.status = LPSolution::Status::kInfeasible;
      sol.pivots = tab.pivots;
      return sol;
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] < art0) continue;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(tab.t[i][j]) > 1e-9) {
          tab.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = art0; j < n; ++j) allowed[j] = false;
  }

  std::vector<double> cost(n, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    cost[col_of[j]] = lp.objective[j];
    if (neg_col[j] != SIZE_MAX) cost[neg_col[j]] = -lp.objective[j];
  }
  tab.set_objective(cost);
  const bool bounded = tab.optimize(allowed, max_pivots);
  sol.pivots = tab.pivots;
  if (!bounded) {
    sol.status = LPSolution::Status::kUnbounded;
    return sol;
  }
  // Basic values for the unperturbed rhs: the initial-basis columns hold B^-1.
  std::vector<double> col_value(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k < m; ++k) v += tab.t[i][tab.init_basis[k]] * rhs0[k];
    if (v < -1e-7 * (1.0 + std::abs(tab.t[i][n]))) {
      throw Error(ErrorCode::kSolverFailure, "optimal basis is infeasible without perturbation");
    }
    col_value[tab.basis[i]] = std::max(v, 0.0);
  }
  sol.y.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    sol.y[j] = col_value[col_of[j]];
    if (neg_col[j] != SIZE_MAX) sol.y[j] -= col_value[neg_col[j]];
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.value += lp.objective[j] * sol.y[j];
  sol.status = LPSolution::Status::kOptimal;
  return sol;
}

double max_violation(const LinearProgram& lp, const std::vector<double>& y) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    double s = -lp.rhs[i];
    for (std::size_t j = 0; j < lp.n_vars; ++j) s += lp.rows[i][j] * y[j];
    worst = std::max(worst, s);
  }
  return lp.rows.empty() ? 0.0 : worst;
}

}  // namespace mechlab
