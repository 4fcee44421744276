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

#include "beamlab/tdm_scheduler.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "beamlab/errors.hpp"

namespace beamlab {

namespace {

bool symmetric_case(double u1, double u2, const LinkPair& links) {
  return u1 == u2 && links[0].gamma() == links[1].gamma() && links[0].rate() + links[1].rate() > 0.0;
}

void check_inputs(double u1, double u2, double t_cm) {
  if (!(u1 > 0.0) || !(u2 > 0.0)) throw std::invalid_argument("scheduler: widths must be positive");
  if (!(t_cm > 0.0)) throw InfeasibleError("scheduler: no communication time left in the frame");
}

void check_feasible(double t_cm, const LinkPair& links) {
  // Each user needs tau_i >= t_fr R_i / kMaxRateExponent for a finite energy.
  const double need = (links[0].frame_s() * links[0].rate() + links[1].frame_s() * links[1].rate()) /
                      kMaxRateExponent;
  if (need >= t_cm) {
    std::ostringstream msg;
    msg << "rates R1=" << links[0].rate() << ", R2=" << links[1].rate()
        << " bps/Hz cannot be delivered in t_cm=" << t_cm << " s";
    throw InfeasibleError(msg.str());
  }
}

}  // namespace

double solve_tau(double u1, double u2, double t_cm, const LinkPair& links, const SolveOptions& opt) {
  check_inputs(u1, u2, t_cm);
  check_feasible(t_cm, links);
  if (symmetric_case(u1, u2, links)) {
    return t_cm * links[0].rate() / (links[0].rate() + links[1].rate());
  }

  // Sign of d/dtau of the objective; infinities mark the overflow region.
  auto slope_sign = [&](double tau) {
    const double d1 = links[0].deriv1(tau);
    const double d2 = links[1].deriv1(t_cm - tau);
    return u1 * d1 - u2 * d2;
  };

  const double delta = opt.bracket_fraction * t_cm;
  double lo = delta;
  double hi = t_cm - delta;
  if (slope_sign(lo) >= 0.0) return lo;
  if (slope_sign(hi) <= 0.0) return hi;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double s = slope_sign(mid);
    if (s < 0.0) {
      lo = mid;
    } else if (s > 0.0) {
      hi = mid;
    } else {
      return mid;
    }
    if (hi - lo <= opt.relative_tolerance * mid) {
      // A narrow bracket is not enough where the ratio is steep; also ask for
      // a small residual of the optimality condition.
      const double t = 0.5 * (lo + hi);
      const double r = links[1].deriv1(t_cm - t) / links[0].deriv1(t);
      if (std::abs(r * u2 - u1) <= opt.residual_tolerance * u1) return t;
    }
  }
  return 0.5 * (lo + hi);
}

double tdm_objective(double tau, double u1, double u2, double t_cm, const LinkPair& links) {
  return u1 * links[0].energy(tau) + u2 * links[1].energy(t_cm - tau);
}

double terminal_cost(double u1, double u2, double t_cm, const LinkPair& links) {
  check_inputs(u1, u2, t_cm);
  double cost = 0.0;
  if (symmetric_case(u1, u2, links)) {
    check_feasible(t_cm, links);
    // Sum-rate form: the per-user split does not enter when gains and widths match.
    const auto& e = links[0];
    const double y = e.frame_s() * (links[0].rate() + links[1].rate()) / t_cm;
    cost = u1 * t_cm * std::expm1(y * std::numbers::ln2) / e.gamma();
  } else {
    const double tau = solve_tau(u1, u2, t_cm, links);
    cost = tdm_objective(tau, u1, u2, t_cm, links);
  }
  if (!std::isfinite(cost)) throw InfeasibleError("terminal cost overflow: rates too high for t_cm");
  return cost;
}

Schedule make_schedule(double u1, double u2, double t_cm, const LinkPair& links) {
  Schedule s;
  s.comm_time = t_cm;
  s.beamwidth1 = u1;
  s.beamwidth2 = u2;
  s.tau1 = solve_tau(u1, u2, t_cm, links);
  s.power1 = links[0].power(s.tau1, u1);
  s.power2 = links[1].power(t_cm - s.tau1, u2);
  s.energy_total = terminal_cost(u1, u2, t_cm, links);
  return s;
}

Schedule make_schedule(const BeliefState& state, const FrameTiming& timing, const LinkPair& links) {
  return make_schedule(state.u1, state.u2, timing.comm_time(), links);
}

}  // namespace beamlab
