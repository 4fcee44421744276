// SPDX-License-Identifier: Apache-2.0
//
// beamlab: two-user millimeter-wave beam-alignment simulator and optimizer
// Copyright (C) 2026 The beamlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMLAB_DP_PLANNER_HPP
#define BEAMLAB_DP_PLANNER_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "beamlab/link_energy.hpp"

namespace beamlab {

/**
 * Discretization of the alignment DP.
 *
 * Widths live on the lattice sigma * m / resolution, m = 0..resolution, and
 * beam-widths are lattice points inside the current uncertainty width, so
 * the root state sees resolution + 1 candidate widths and every successor
 * width is again a lattice point. Values are indexed by integers, never by
 * accumulated floating-point widths.
 */
struct DpGrid {
  int resolution = 256;
  /// Evaluate only states reachable from (sigma, sigma, co-located) at each slot.
  bool reachable_only = true;
  int threads = 0;
};

inline constexpr int kMaxDpSlots = 10;
inline constexpr int kMinDpResolution = 128;

/// Relative slack under which two action values count as tied. Ties resolve
/// to the candidate closest to bisection.
inline constexpr double kDpTieTolerance = 1e-12;

/// Optimal values V_k over the lattice for k = 0..L, with the chosen actions.
class ValueTable {
 public:
  ValueTable(int slots, int resolution, double sigma, double comm_time);

  int slots() const { return slots_; }
  int resolution() const { return resolution_; }
  double sigma() const { return sigma_; }
  double comm_time() const { return comm_time_; }
  double width(int m) const { return sigma_ * m / resolution_; }

  /// V_k(m w, m w, co-located); NaN where not evaluated.
  double co_value(int k, int m) const { return co_[k][m]; }
  /// V_k(m1 w, m2 w, separated) for m1 + m2 <= resolution; NaN where not evaluated.
  double sep_value(int k, int m1, int m2) const { return sep_[k][index(m1, m2)]; }
  bool co_evaluated(int k, int m) const;
  bool sep_evaluated(int k, int m1, int m2) const;

  /// Chosen beam-width (lattice units) at an evaluated state with k < L.
  int co_argmin(int k, int m) const { return co_arg_[k][m]; }
  std::pair<int, int> sep_argmin(int k, int m1, int m2) const {
    return {sep_arg1_[k][index(m1, m2)], sep_arg2_[k][index(m1, m2)]};
  }

  /// Expected V_{k+1} after offering beam-widths in lattice units.
  double co_objective(int k, int m, int j) const;
  double sep_objective(int k, int m1, int m2, int j1, int j2) const;

  // Mutable access for building and for fault-injection tests.
  double& co_value_ref(int k, int m) { return co_[k][m]; }
  double& sep_value_ref(int k, int m1, int m2) { return sep_[k][index(m1, m2)]; }

 private:
  friend ValueTable backward_induction(int, double, const FrameTiming&, const LinkPair&, const DpGrid&);

  std::size_t index(int m1, int m2) const {
    return static_cast<std::size_t>(m1) * (resolution_ + 1) + static_cast<std::size_t>(m2);
  }

  int slots_;
  int resolution_;
  double sigma_;
  double comm_time_;
  std::vector<std::vector<double>> co_;
  std::vector<std::vector<double>> sep_;
  std::vector<std::vector<std::int16_t>> co_arg_;
  std::vector<std::vector<std::int16_t>> sep_arg1_;
  std::vector<std::vector<std::int16_t>> sep_arg2_;
};

/**
 * Backward induction over L alignment slots starting from width sigma.
 * Throws ConfigError for L > kMaxDpSlots or resolution < kMinDpResolution,
 * InfeasibleError when the terminal schedule cannot meet the rates.
 */
ValueTable backward_induction(int slots, double sigma, const FrameTiming& timing, const LinkPair& links,
                              const DpGrid& grid = {});

struct BisectionViolation {
  int slot = 0;
  int m1 = 0;
  int m2 = 0;
  bool co_located = false;
  int argmin1 = 0;
  int argmin2 = 0;
  double grid_min = 0.0;
  double bisection_value = 0.0;
  std::string reason;
};

struct BisectionReport {
  std::size_t states_checked = 0;
  std::size_t value_checks = 0;  ///< states whose exact half-width is a lattice point
  double max_relative_gap = 0.0;  ///< max (V(bisection) - grid min) / grid min, on-lattice states
  /// max (bisection policy value - grid min) / grid min over all states; the
  /// policy value is the terminal cost at u / 2^(L-k), off-lattice included.
  double max_policy_gap = -std::numeric_limits<double>::infinity();
  double max_argmin_offset = 0.0;  ///< max |argmin - u/2| in lattice steps
  std::vector<BisectionViolation> violations;

  bool passed() const { return violations.empty(); }
};

/**
 * Rescans every evaluated state with k < L against the stored V_{k+1} and
 * checks that the minimizer sits within one lattice step of u_i / 2, that
 * exact bisection (when on the lattice) is within `relative_tolerance` of
 * the minimum, that the value of bisecting in every remaining slot is no
 * worse than the minimum, and that the stored V_k matches the rescan.
 */
BisectionReport verify_bisection_optimality(const ValueTable& table, const LinkPair& links,
                                            double relative_tolerance, int threads = 0);

struct IdentityReport {
  std::size_t states_checked = 0;
  double max_relative_error = 0.0;
};

/// Compares V_k(u, u, rho) with the terminal cost at u / 2^(L-k) for every
/// evaluated diagonal state whose bisection path stays on the lattice.
IdentityReport bisection_identity_report(const ValueTable& table, const LinkPair& links);

/// Average power of joint bisection over timing.slots slots:
/// sigma / (t_fr 2^L) [eps1(tau*) + eps2(t_cm - tau*)].
double closed_form_power(double sigma, const FrameTiming& timing, const LinkPair& links);

/// Equal-gain special case: sigma / (gamma 2^L) (t_cm / t_fr) (2^(t_fr R_tot / t_cm) - 1).
double closed_form_power_equal_gain(double sigma, const FrameTiming& timing, double gamma, double rate_total);

/// CSV columns: k,u1_frac,u2_frac,rho,value_J,argmin_w1_frac,argmin_w2_frac.
void write_value_table_csv(const ValueTable& table, std::ostream& os);

}  // namespace beamlab

#endif  // BEAMLAB_DP_PLANNER_HPP
