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

#ifndef BEAMLAB_TDM_SCHEDULER_HPP
#define BEAMLAB_TDM_SCHEDULER_HPP

#include "beamlab/alignment_state.hpp"
#include "beamlab/link_energy.hpp"

namespace beamlab {

/// Data-phase plan: user 1 for tau1 seconds, then user 2 for the rest of t_cm.
struct Schedule {
  double comm_time = 0.0;
  double tau1 = 0.0;
  double power1 = 0.0;
  double power2 = 0.0;
  double beamwidth1 = 0.0;
  double beamwidth2 = 0.0;
  double energy_total = 0.0;

  double tau2() const { return comm_time - tau1; }
};

struct SolveOptions {
  int max_iterations = 80;
  double relative_tolerance = 1e-12;
  /// Required |ratio - u1/u2| / (u1/u2) before the bracket test may stop.
  double residual_tolerance = 1e-11;
  /// Bracket is [delta, t_cm - delta] with delta = bracket_fraction * t_cm.
  double bracket_fraction = 1e-9;
};

/**
 * Optimal time share of user 1: the root of
 *
 *   u1 eps1'(tau) = u2 eps2'(t_cm - tau),
 *
 * i.e. eps2'(t_cm - tau) / eps1'(tau) = u1 / u2. The left minus right side is
 * strictly increasing in tau, so bracketed bisection always converges. When
 * both users have the same gain and width the root is t_cm R1 / (R1 + R2) and
 * is returned directly. Throws InfeasibleError when no tau in (0, t_cm)
 * keeps both energies finite.
 */
double solve_tau(double u1, double u2, double t_cm, const LinkPair& links, const SolveOptions& opt = {});

/// min over tau of u1 eps1(tau) + u2 eps2(t_cm - tau), in joules.
double terminal_cost(double u1, double u2, double t_cm, const LinkPair& links);

/// Objective u1 eps1(tau) + u2 eps2(t_cm - tau) at a given tau.
double tdm_objective(double tau, double u1, double u2, double t_cm, const LinkPair& links);

/// Beams cover the supports, tau1 from solve_tau, powers meet the rates exactly.
Schedule make_schedule(const BeliefState& state, const FrameTiming& timing, const LinkPair& links);
Schedule make_schedule(double u1, double u2, double t_cm, const LinkPair& links);

}  // namespace beamlab

#endif  // BEAMLAB_TDM_SCHEDULER_HPP
