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

#ifndef MECHLAB_VERIFY_HPP_
#define MECHLAB_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mechlab/lp.hpp"
#include "mechlab/mechanism.hpp"
#include "mechlab/model.hpp"
#include "mechlab/scenario.hpp"

namespace mechlab {

// kSameAlpha restricts deviations to nodes sharing alpha (observable wealth).
enum class ICScope { kAllPairs, kSameAlpha };

struct ICReport {
  double max_gain = 0.0;
  std::size_t source = 0;  // node whose report is misused
  std::size_t target = 0;  // node whose bundle it prefers
  Type source_type;
  Type target_type;
  std::size_t n_pairs = 0;
  double epsilon = 0.0;
  ICScope scope = ICScope::kAllPairs;
  bool pass = true;
};

// max over ordered node pairs of U[theta; b(theta')] - U[theta; b(theta)].
// Ties go to the lowest (source, target) in row-major order, independent of
// the thread count (0 = one thread).
ICReport check_ic(const Mechanism& mech, const Grid& grid, double epsilon = 1e-8,
                  ICScope scope = ICScope::kAllPairs, unsigned threads = 0);
ICReport check_ic(const UtilityModel& utility, const Grid& grid,
                  const std::vector<Bundle>& bundles, double epsilon = 1e-8,
                  ICScope scope = ICScope::kAllPairs, unsigned threads = 0);

struct IRReport {
  double min_utility = 0.0;
  std::size_t node = 0;
  Type witness;
  double tolerance = 0.0;
  bool pass = true;
};

IRReport check_ir(const Mechanism& mech, const Grid& grid, double tolerance = 1e-9);
IRReport check_ir(const UtilityModel& utility, const Grid& grid,
                  const std::vector<Bundle>& bundles, double tolerance = 1e-9);

struct EquityReport {
  double max_spread = 0.0;
  std::size_t bins = 0;
  bool exact = false;
  Type witness_a;  // the pair realizing max_spread
  Type witness_b;
  std::size_t n_samples = 0;
  double tolerance = 0.0;
  bool pass = true;
};

// Exact mode for merit-measurable mechanisms: closed-form ones are sampled
// along traced iso-merit contours, grid-sampled ones compared across nodes of
// equal merit.  Otherwise nodes are binned by merit.
EquityReport check_equity(const Mechanism& mech, const MeritFunction& merit, const Grid& grid,
                          std::size_t n_bins = 20, double tolerance = 1e-9);

struct MonotonicityReport {
  double worst_drop = 0.0;  // largest x(prev) - x(next) along increasing merit
  Type witness_lo;          // lower merit, higher allocation
  Type witness_hi;
  double tolerance = 0.0;
  bool pass = true;
};

// Throws kNotEquitable when check_equity fails at the given tolerance.
MonotonicityReport check_merit_monotone(const Mechanism& mech, const MeritFunction& merit,
                                        const Grid& grid, double tolerance = 1e-9,
                                        std::size_t n_bins = 20);

struct ConvexityReport {
  double min_midpoint_defect = 0.0;
  double min_subgradient_defect = 0.0;
  KL midpoint_witness_a, midpoint_witness_b;
  KL subgradient_witness_a, subgradient_witness_b;
  std::size_t n_trials = 0;
  double tolerance = 0.0;
  bool pass = true;
};

// Random pairs in the mechanism's (kappa, lambda) rectangle drawn from
// mt19937_64(seed).
ConvexityReport check_convexity(const ThresholdMechanism& mech, std::size_t n_trials,
                                std::uint64_t seed, double tolerance = 1e-9);

struct ProbeOptions {
  // false gives every node its own menu (no equity), the mutation baseline.
  bool couple_equity = true;
  // Points where bin-edge iso-merit curves meet the rectangle belong to the
  // closure of both adjacent classes and are constrained as members of each.
  bool class_boundaries = true;
  std::size_t boundary_points = 3;
};

struct ProbeProblem {
  LinearProgram lp;  // objective left zero; variables x_0..x_{C-1}, t_0..t_{C-1}
  std::size_t n_classes = 0;
  std::vector<double> class_merit;  // mean merit of each class, increasing
  std::size_t n_types = 0;
};

ProbeProblem make_probe_problem(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                const Grid& grid, Instrument instrument, std::size_t n_levels,
                                const ProbeOptions& options = {});

struct ProbeResult {
  double max_equitable_spread = 0.0;
  Instrument instrument = Instrument::kPayments;
  std::size_t n_classes = 0;
  std::size_t n_types = 0;
  std::size_t n_constraints = 0;
  std::size_t lps_solved = 0;
  std::size_t argmax_hi = 0;  // class with the larger allocation
  std::size_t argmax_lo = 0;
  std::vector<double> x;  // certificate menu
  std::vector<double> t;
  std::vector<double> class_merit;
  double min_slack = 0.0;
};

// Largest x_a - x_b over equitable menus satisfying IC and IR at every type.
// Grids above 12 x 12 are rejected.  Throws kSolverFailure if the optimum
// fails the certificate recheck.
ProbeResult probe_single_instrument(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                    const Grid& grid, Instrument instrument,
                                    std::size_t n_levels, const ProbeOptions& options = {});

struct KnifeEdgeResult {
  double dispersion = 0.0;  // (max r - min r) / max r
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t n_samples = 0;
  bool escaped = false;  // contour left the rectangle early and was clipped
};

// r = beta / z(alpha) along the iso-merit curve eta = eta_star.
KnifeEdgeResult knife_edge_diagnostic(const LinearUtilitySpec& spec, const MeritFunction& merit,
                                      const TypeSpace& space, double eta_star,
                                      std::size_t n_samples = 1001);
// r = v_x(beta, x) / z_q(alpha, q) at fixed levels.
KnifeEdgeResult knife_edge_diagnostic(const NonlinearUtilitySpec& spec,
                                      const MeritFunction& merit, const TypeSpace& space,
                                      double eta_star, double x, double q,
                                      std::size_t n_samples = 1001);
// Second condition for a declared two-point menu {a, b}: the utility
// difference v(beta, x_a) - z(alpha, q_a) - v(beta, x_b) + z(alpha, q_b) is
// constant along the curve.  r holds that difference; dispersion is its
// range over max |v(beta, x_a) - v(beta, x_b)|.
KnifeEdgeResult two_point_diagnostic(const NonlinearUtilitySpec& spec,
                                     const MeritFunction& merit, const TypeSpace& space,
                                     double eta_star, const Bundle& a, const Bundle& b,
                                     std::size_t n_samples = 1001);

}  // namespace mechlab

#endif  // MECHLAB_VERIFY_HPP_
