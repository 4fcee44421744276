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

#ifndef BEAMLAB_ALIGNMENT_STATE_HPP
#define BEAMLAB_ALIGNMENT_STATE_HPP

#include <array>
#include <optional>

#include "beamlab/arcset.hpp"
#include "beamlab/rng.hpp"

namespace beamlab {

/**
 * Belief over the two users' angles after some alignment slots.
 *
 * The posterior is uniform and independent across users on the supports, so
 * (u1, u2, co_located) is sufficient for planning. The supports themselves
 * are carried only in explicit-geometry mode; they are either identical
 * (co_located) or disjoint.
 */
struct BeliefState {
  double u1 = kTwoPi;
  double u2 = kTwoPi;
  bool co_located = true;
  std::optional<std::array<ArcSet, 2>> supports;

  bool explicit_geometry() const { return supports.has_value(); }
  double width(int user) const { return user == 0 ? u1 : u2; }

  friend bool operator==(const BeliefState&, const BeliefState&) = default;
};

/// True user angles for one frame.
struct GroundTruth {
  double theta1 = 0.0;
  double theta2 = 0.0;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// ACK (true) / NACK (false) from each user for one beacon.
struct Feedback {
  bool ack1 = false;
  bool ack2 = false;

  bool ack(int user) const { return user == 0 ? ack1 : ack2; }
  friend bool operator==(const Feedback&, const Feedback&) = default;
};

/// Tolerance used when comparing requested widths against uncertainty widths.
inline constexpr double kWidthTolerance = 1e-10;

/// Prior: both users uniform on [-sigma/2, sigma/2). Throws ConfigError unless 0 < sigma <= 2 pi.
BeliefState initial_state(double sigma, bool explicit_geometry = true);

/// Independent uniform draw of both angles on the prior support.
GroundTruth draw_ground_truth(double sigma, Rng& rng);

/// Error-free beacon detection.
Feedback feedback(const GroundTruth& truth, const ArcSet& beam);

/**
 * Bayes step on explicit supports: S_i <- S_i & beam (ACK) or S_i \ beam (NACK).
 * Widths are re-measured and co-location is re-tested by set identity. Throws
 * InconsistencyError if a support becomes empty, ConfigError without geometry.
 */
BeliefState update_supports(const BeliefState& s, const ArcSet& beam, const Feedback& fb);

/// Statistic-only transition: u_i' = w_i on ACK, u_i - w_i on NACK.
BeliefState transition(const BeliefState& s, double w1, double w2, const Feedback& fb);

/// Joint feedback law for beam-widths (w1, w2) inside the current supports.
struct OutcomeProbabilities {
  // [ack1][ack2]
  std::array<std::array<double, 2>, 2> p{};

  double operator()(bool ack1, bool ack2) const { return p[ack1][ack2]; }
  double total() const { return p[0][0] + p[0][1] + p[1][0] + p[1][1]; }
};

OutcomeProbabilities ack_probabilities(const BeliefState& s, double w1, double w2);

/**
 * A beacon beam covering w_i of user i's support. Co-located users share one
 * cut of the common support; separated users get the union of two cuts.
 */
ArcSet realize_beam(const BeliefState& s, double w1, double w2, Placement placement = Placement::front);

/// Feedback drawn from ack_probabilities, for runs without ground truth.
Feedback sample_feedback(const BeliefState& s, double w1, double w2, Rng& rng);

}  // namespace beamlab

#endif  // BEAMLAB_ALIGNMENT_STATE_HPP
