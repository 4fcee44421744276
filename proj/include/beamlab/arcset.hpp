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

#ifndef BEAMLAB_ARCSET_HPP
#define BEAMLAB_ARCSET_HPP

#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace beamlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Half-open angular interval [start, end) with -pi <= start < end <= pi.
struct Arc {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Maps any angle onto the reference range [-pi, pi).
double wrap_angle(double theta);

enum class Placement {
  front,  ///< consume arcs in ascending order, each from its start point
  back,   ///< consume arcs in descending order, each from its end point
};

/**
 * A finite union of angular intervals on the circle.
 *
 * Stored in canonical form: arcs are sorted, pairwise disjoint, separated by
 * gaps larger than kMergeTolerance, and confined to [-pi, pi). An arc that
 * crosses the branch point at pi is split into [x, pi) and [-pi, y), so two
 * sets describing the same points hold identical arc lists and compare equal.
 */
class ArcSet {
 public:
  /// Gaps and slivers at or below this width (rad) are absorbed.
  static constexpr double kMergeTolerance = 1e-12;

  ArcSet() = default;

  static ArcSet full();

  /// Interval [lo, hi) without wrap; requires -pi <= lo <= hi <= pi.
  static ArcSet interval(double lo, double hi);

  /// Counter-clockwise arc of the given width starting at `start` (any angle).
  /// Width is clamped to [0, 2 pi].
  static ArcSet arc(double start, double width);

  /// Canonicalizes an arbitrary list of in-range arcs (may overlap, any order).
  static ArcSet from_arcs(std::span<const Arc> arcs);

  const std::vector<Arc>& arcs() const { return arcs_; }
  bool empty() const { return arcs_.empty(); }
  bool is_full() const;
  double measure() const;

  /// Half-open membership; theta must lie in [-pi, pi).
  bool contains(double theta) const;

  std::string to_string() const;

  friend bool operator==(const ArcSet&, const ArcSet&) = default;

 private:
  explicit ArcSet(std::vector<Arc> canonical) : arcs_(std::move(canonical)) {}
  static ArcSet canonicalize(std::vector<Arc> arcs);

  std::vector<Arc> arcs_;
};

ArcSet intersect(const ArcSet& a, const ArcSet& b);
ArcSet complement(const ArcSet& a);
ArcSet unite(const ArcSet& a, const ArcSet& b);
ArcSet difference(const ArcSet& a, const ArcSet& b);

/// Subset of `a` with measure exactly `width`. Throws std::out_of_range unless
/// 0 <= width <= measure(a) (up to the merge tolerance).
ArcSet take_measured_subset(const ArcSet& a, double width, Placement placement = Placement::front);

std::ostream& operator<<(std::ostream& os, const ArcSet& set);

}  // namespace beamlab

#endif  // BEAMLAB_ARCSET_HPP
