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

#include "beamlab/arcset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace beamlab {

double wrap_angle(double theta) {
  double wrapped = theta - kTwoPi * std::floor((theta + kPi) / kTwoPi);
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped = -kPi;
  return wrapped;
}

ArcSet ArcSet::canonicalize(std::vector<Arc> arcs) {
  constexpr double tol = kMergeTolerance;
  std::vector<Arc> kept;
  kept.reserve(arcs.size());
  for (Arc a : arcs) {
    a.start = std::max(a.start, -kPi);
    a.end = std::min(a.end, kPi);
    if (a.start < -kPi + tol) a.start = -kPi;
    if (a.end > kPi - tol) a.end = kPi;
    if (a.end - a.start > tol) kept.push_back(a);
  }
  std::sort(kept.begin(), kept.end(), [](const Arc& x, const Arc& y) {
    return x.start < y.start || (x.start == y.start && x.end < y.end);
  });

  std::vector<Arc> merged;
  merged.reserve(kept.size());
  for (const Arc& a : kept) {
    if (!merged.empty() && a.start <= merged.back().end + tol) {
      merged.back().end = std::max(merged.back().end, a.end);
    } else {
      merged.push_back(a);
    }
  }
  return ArcSet(std::move(merged));
}

ArcSet ArcSet::full() { return ArcSet(std::vector<Arc>{{-kPi, kPi}}); }

ArcSet ArcSet::interval(double lo, double hi) {
  if (!(lo >= -kPi && hi <= kPi && lo <= hi)) {
    throw std::out_of_range("ArcSet::interval: bounds must satisfy -pi <= lo <= hi <= pi");
  }
  return canonicalize({{lo, hi}});
}

ArcSet ArcSet::arc(double start, double width) {
  width = std::clamp(width, 0.0, kTwoPi);
  if (width >= kTwoPi - kMergeTolerance) return full();
  const double s = wrap_angle(start);
  const double e = s + width;
  if (e <= kPi) return canonicalize({{s, e}});
  return canonicalize({{s, kPi}, {-kPi, e - kTwoPi}});
}

ArcSet ArcSet::from_arcs(std::span<const Arc> arcs) {
  return canonicalize(std::vector<Arc>(arcs.begin(), arcs.end()));
}

bool ArcSet::is_full() const {
  return arcs_.size() == 1 && arcs_.front().start == -kPi && arcs_.front().end == kPi;
}

double ArcSet::measure() const {
  double total = 0.0;
  for (const Arc& a : arcs_) total += a.length();
  return total;
}

bool ArcSet::contains(double theta) const {
  auto it = std::upper_bound(arcs_.begin(), arcs_.end(), theta,
                             [](double t, const Arc& a) { return t < a.start; });
  if (it == arcs_.begin()) return false;
  --it;
  return theta < it->end;
}

std::string ArcSet::to_string() const {
  if (arcs_.empty()) return "{}";
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    if (i > 0) out += " U ";
    std::snprintf(buf, sizeof(buf), "[%.6f, %.6f)", arcs_[i].start, arcs_[i].end);
    out += buf;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const ArcSet& set) { return os << set.to_string(); }

ArcSet intersect(const ArcSet& a, const ArcSet& b) {
  const auto& x = a.arcs();
  const auto& y = b.arcs();
  std::vector<Arc> out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    const double lo = std::max(x[i].start, y[j].start);
    const double hi = std::min(x[i].end, y[j].end);
    if (lo < hi) out.push_back({lo, hi});
    if (x[i].end < y[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return ArcSet::from_arcs(out);
}

ArcSet complement(const ArcSet& a) {
  std::vector<Arc> out;
  double cursor = -kPi;
  for (const Arc& arc : a.arcs()) {
    if (arc.start > cursor) out.push_back({cursor, arc.start});
    cursor = arc.end;
  }
  if (cursor < kPi) out.push_back({cursor, kPi});
  return ArcSet::from_arcs(out);
}

ArcSet unite(const ArcSet& a, const ArcSet& b) {
  std::vector<Arc> all(a.arcs());
  all.insert(all.end(), b.arcs().begin(), b.arcs().end());
  return ArcSet::from_arcs(all);
}

ArcSet difference(const ArcSet& a, const ArcSet& b) { return intersect(a, complement(b)); }

ArcSet take_measured_subset(const ArcSet& a, double width, Placement placement) {
  const double total = a.measure();
  constexpr double tol = ArcSet::kMergeTolerance;
  if (!(width >= -tol && width <= total + tol)) {
    throw std::out_of_range("take_measured_subset: width outside [0, measure]");
  }
  if (width >= total) return a;
  if (width <= 0.0) return ArcSet();

  std::vector<Arc> out;
  double remaining = width;
  const auto& arcs = a.arcs();
  if (placement == Placement::front) {
    for (auto it = arcs.begin(); it != arcs.end() && remaining > 0.0; ++it) {
      if (it->length() <= remaining) {
        out.push_back(*it);
        remaining -= it->length();
      } else {
        out.push_back({it->start, it->start + remaining});
        remaining = 0.0;
      }
    }
  } else {
    for (auto it = arcs.rbegin(); it != arcs.rend() && remaining > 0.0; ++it) {
      if (it->length() <= remaining) {
        out.push_back(*it);
        remaining -= it->length();
      } else {
        out.push_back({it->end - remaining, it->end});
        remaining = 0.0;
      }
    }
  }
  return ArcSet::from_arcs(out);
}

}  // namespace beamlab
