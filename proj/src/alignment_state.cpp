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

#include "beamlab/alignment_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamlab/errors.hpp"

namespace beamlab {

namespace {

void check_widths(const BeliefState& s, double w1, double w2) {
  const double tol1 = kWidthTolerance * s.u1;
  const double tol2 = kWidthTolerance * s.u2;
  if (!(w1 >= -tol1 && w1 <= s.u1 + tol1) || !(w2 >= -tol2 && w2 <= s.u2 + tol2)) {
    throw std::out_of_range("beam-width outside [0, u]");
  }
  if (s.co_located && std::abs(w1 - w2) > tol1) {
    throw std::invalid_argument("co-located users must be offered the same beam-width");
  }
}

}  // namespace

BeliefState initial_state(double sigma, bool explicit_geometry) {
  if (!(sigma > 0.0 && sigma <= kTwoPi)) throw ConfigError("sigma must lie in (0, 2 pi]");
  BeliefState s;
  s.u1 = sigma;
  s.u2 = sigma;
  s.co_located = true;
  if (explicit_geometry) {
    const ArcSet prior = sigma >= kTwoPi ? ArcSet::full() : ArcSet::interval(-sigma / 2, sigma / 2);
    s.supports = std::array<ArcSet, 2>{prior, prior};
  }
  return s;
}

GroundTruth draw_ground_truth(double sigma, Rng& rng) {
  auto draw = [&] {
    double theta = rng.uniform(-sigma / 2, sigma / 2);
    if (theta >= sigma / 2) theta = -sigma / 2;
    return wrap_angle(theta);
  };
  GroundTruth gt;
  gt.theta1 = draw();
  gt.theta2 = draw();
  return gt;
}

Feedback feedback(const GroundTruth& truth, const ArcSet& beam) {
  return {beam.contains(truth.theta1), beam.contains(truth.theta2)};
}

BeliefState update_supports(const BeliefState& s, const ArcSet& beam, const Feedback& fb) {
  if (!s.explicit_geometry()) throw ConfigError("update_supports requires explicit supports");
  const auto& old = *s.supports;
  std::array<ArcSet, 2> next;
  for (int i = 0; i < 2; ++i) {
    next[i] = fb.ack(i) ? intersect(old[i], beam) : difference(old[i], beam);
    if (next[i].empty()) {
      throw InconsistencyError("support of user " + std::to_string(i + 1) +
                               " became empty under error-free feedback");
    }
  }
  BeliefState out;
  out.u1 = next[0].measure();
  out.u2 = next[1].measure();
  out.co_located = next[0] == next[1];
  if (!out.co_located && intersect(next[0], next[1]).measure() > ArcSet::kMergeTolerance) {
    throw InconsistencyError("supports are neither identical nor disjoint");
  }
  out.supports = std::move(next);
  return out;
}

BeliefState transition(const BeliefState& s, double w1, double w2, const Feedback& fb) {
  check_widths(s, w1, w2);
  w1 = std::clamp(w1, 0.0, s.u1);
  w2 = std::clamp(w2, 0.0, s.u2);
  BeliefState out;
  out.u1 = fb.ack1 ? w1 : s.u1 - w1;
  out.u2 = fb.ack2 ? w2 : s.u2 - w2;
  if (!(out.u1 > 0.0) || !(out.u2 > 0.0)) {
    throw InconsistencyError("feedback outcome has zero probability under the chosen widths");
  }
  out.co_located = s.co_located && fb.ack1 == fb.ack2;
  return out;
}

OutcomeProbabilities ack_probabilities(const BeliefState& s, double w1, double w2) {
  check_widths(s, w1, w2);
  const double p1 = std::clamp(w1 / s.u1, 0.0, 1.0);
  const double p2 = std::clamp(w2 / s.u2, 0.0, 1.0);
  OutcomeProbabilities out;
  out.p[1][1] = p1 * p2;
  out.p[1][0] = p1 * (1.0 - p2);
  out.p[0][1] = (1.0 - p1) * p2;
  out.p[0][0] = (1.0 - p1) * (1.0 - p2);
  return out;
}

ArcSet realize_beam(const BeliefState& s, double w1, double w2, Placement placement) {
  if (!s.explicit_geometry()) throw ConfigError("realize_beam requires explicit supports");
  check_widths(s, w1, w2);
  const auto& sup = *s.supports;
  w1 = std::min(std::max(w1, 0.0), sup[0].measure());
  w2 = std::min(std::max(w2, 0.0), sup[1].measure());
  if (s.co_located) return take_measured_subset(sup[0], w1, placement);
  return unite(take_measured_subset(sup[0], w1, placement),
               take_measured_subset(sup[1], w2, placement));
}

Feedback sample_feedback(const BeliefState& s, double w1, double w2, Rng& rng) {
  check_widths(s, w1, w2);
  Feedback fb;
  fb.ack1 = rng.bernoulli(w1 / s.u1);
  fb.ack2 = rng.bernoulli(w2 / s.u2);
  return fb;
}

}  // namespace beamlab
