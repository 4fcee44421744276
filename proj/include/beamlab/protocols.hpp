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

#ifndef BEAMLAB_PROTOCOLS_HPP
#define BEAMLAB_PROTOCOLS_HPP

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "beamlab/alignment_state.hpp"
#include "beamlab/tdm_scheduler.hpp"

namespace beamlab {

enum class Scheme { joint_bisection, joint_exhaustive, single_user };

std::string_view scheme_name(Scheme scheme);
/// Accepts "joint-bisection", "joint-exhaustive", "single-user"; throws ConfigError otherwise.
Scheme parse_scheme(std::string_view name);

struct BeamWidths {
  double w1 = 0.0;
  double w2 = 0.0;
};

/// Per-slot beam-width rule on the sufficient statistic. The terminal
/// decision is always the optimal TDM schedule for the final widths.
struct Policy {
  std::string name;
  std::function<BeamWidths(const BeliefState&, int slot)> action;
};

/// Scans half of each user's uncertainty region in every slot.
Policy bisection_policy();

/// Scans a fixed fraction of each width per slot (fractions[slot] in [0, 1]).
Policy fraction_policy(std::vector<double> fractions);

/// One alignment slot as seen by the trace and by tests.
struct SlotRecord {
  int slot = 0;
  ArcSet beam;
  BeamWidths widths;
  Feedback fb;
  BeliefState after;  ///< statistic only (supports stripped)
};

enum class Geometry {
  explicit_supports,  ///< beams cut from ArcSet supports, feedback from ground truth
  statistic_only,     ///< feedback sampled from the ACK law, no geometry
};

struct AlignmentOptions {
  Geometry geometry = Geometry::explicit_supports;
  Placement placement = Placement::front;
  bool record_trace = false;
};

struct AlignmentRun {
  BeliefState final_state;
  std::vector<bool> co_located_trajectory;  ///< rho after each slot, starting with the prior
  std::vector<SlotRecord> trace;
};

/**
 * Runs `slots` alignment slots of a policy from the prior of width sigma.
 * In explicit mode the supports are updated geometrically and the widths
 * follow the exact statistic transition; the two are checked against each
 * other every slot. Statistic-only mode draws feedback from `rng`.
 */
AlignmentRun run_alignment(const Policy& policy, int slots, double sigma, const GroundTruth& truth,
                           const AlignmentOptions& options = {}, Rng* rng = nullptr);

/// Result of one frame of a joint scheme.
struct FrameOutcome {
  int slots_used = 0;
  bool feasible = true;
  Schedule schedule;
  double energy_j = 0.0;
  double power_w = 0.0;
  std::vector<bool> co_located_trajectory;
  std::vector<SlotRecord> trace;
};

/// Joint bisection: L = timing.slots slots, then the optimal TDM schedule.
FrameOutcome joint_bisection_frame(const GroundTruth& truth, double sigma, const FrameTiming& timing,
                                   const LinkPair& links, bool record_trace = false);

struct ExhaustiveConfig {
  int depth = 7;         ///< K = 2^depth beams of width sigma / K
  double sigma = kTwoPi;  ///< scanned sector [-sigma/2, sigma/2)

  int beams() const { return 1 << depth; }
  double beam_width() const { return sigma / beams(); }
  /// Throws ConfigError unless 0 <= depth <= 20 and 0 < sigma <= 2 pi.
  void validate() const;
};

/// Cell j (1-based) is [-sigma/2 + (j-1) sigma/K, -sigma/2 + j sigma/K);
/// for sigma = 2 pi the first cell starts at -pi.
ArcSet exhaustive_beam(const ExhaustiveConfig& cfg, int index);

/**
 * Joint exhaustive scan: beams 1..K in order until both users have ACKed.
 * Uses max(id1, id2) slots; a frame whose scan leaves no data time is
 * reported with feasible = false.
 */
FrameOutcome exhaustive_protocol(const GroundTruth& truth, const ExhaustiveConfig& cfg, const FrameTiming& timing,
                                 const LinkPair& links);

/// 1-based index of the cell containing theta.
int exhaustive_cell(const ExhaustiveConfig& cfg, double theta);

/// Expected power of exhaustive search under independent uniform angles,
/// from the law of max(id1, id2). Throws InfeasibleError if any scan length
/// leaves too little data time.
double exhaustive_expected_power(const ExhaustiveConfig& cfg, const FrameTiming& timing, const LinkPair& links);

struct SingleUserConfig {
  int slots1 = 7;  ///< bisection slots in user 1's frames (odd frames)
  int slots2 = 7;  ///< bisection slots in user 2's frames (even frames)
};

struct SingleUserOutcome {
  std::array<double, 2> energy_j{};
  std::array<int, 2> slots{};
  double power_w = 0.0;  ///< (E1 + E2) / (2 t_fr)
  std::array<std::vector<SlotRecord>, 2> trace;
};

/**
 * Alternating frames: user i alone aligns by bisection over slots_i slots and
 * then receives at 2 R_i for the rest of its frame. The idle user draws no power.
 */
SingleUserOutcome single_user_protocol(const GroundTruth& truth, const SingleUserConfig& cfg, double sigma,
                                       const FrameTiming& timing, const LinkPair& links, bool record_trace = false);

/// Deterministic average power of the single-user scheme.
double single_user_power(const SingleUserConfig& cfg, double sigma, const FrameTiming& timing, const LinkPair& links);

struct DepthChoice {
  int depth1 = 0;
  int depth2 = 0;  ///< equals depth1 for joint schemes
  double power_w = 0.0;
};

/**
 * Enumerates depths 1..cap (pairs for single-user) and returns the lowest
 * expected power; ties go to the smaller depth. Depths that are infeasible
 * are skipped; throws InfeasibleError if none is feasible.
 */
DepthChoice optimize_depth(Scheme scheme, int cap, double sigma, const FrameTiming& timing, const LinkPair& links);

/// Expected power of a scheme at fixed depth(s), from the closed forms.
double expected_power(Scheme scheme, int depth1, int depth2, double sigma, const FrameTiming& timing,
                      const LinkPair& links);

}  // namespace beamlab

#endif  // BEAMLAB_PROTOCOLS_HPP
