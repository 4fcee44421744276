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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "beamlab/dp_planner.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/tdm_scheduler.hpp"
#include "test_support.hpp"

using namespace beamlab;
using beamlab::testing::rel_diff;

namespace {

FrameTiming timing_with(int slots) {
  FrameTiming t;
  t.slots = slots;
  return t;
}

LinkPair links_with(double r1, double r2, double d2 = 50.0) {
  LinkParams a;
  a.rate_bps_per_hz = r1;
  LinkParams b;
  b.rate_bps_per_hz = r2;
  b.distance_m = d2;
  return make_link_pair(a, b, 2e-3);
}

}  // namespace

TEST_CASE("zero slots gives the terminal cost at the prior width") {
  const LinkPair l = links_with(1.0, 1.0);
  const FrameTiming t = timing_with(0);
  const ValueTable v = backward_induction(0, kTwoPi, t, l, {128});
  CHECK(v.co_value(0, 128) == doctest::Approx(terminal_cost(kTwoPi, kTwoPi, t.comm_time(), l)).epsilon(1e-15));
}

TEST_CASE("one slot matches a direct grid evaluation") {
  const LinkPair l = links_with(1.0, 1.0);
  const FrameTiming t = timing_with(1);
  const int n = 256;
  const ValueTable v = backward_induction(1, kTwoPi, t, l, {n});
  // Co-located root: both ACK, both NACK, or a discordant split.
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int j = 1; j < n; ++j) {
    const double p = static_cast<double>(j) / n;
    const double w = kTwoPi * j / n;
    const double rest = kTwoPi - w;
    const double value = p * p * terminal_cost(w, w, t.comm_time(), l) +
                         (1 - p) * (1 - p) * terminal_cost(rest, rest, t.comm_time(), l) +
                         2 * p * (1 - p) * terminal_cost(w, rest, t.comm_time(), l);
    if (value < best * (1 - 1e-12)) {
      best = value;
      arg = j;
    }
  }
  CHECK(arg == n / 2);
  CHECK(v.co_argmin(0, n) == n / 2);
  CHECK(rel_diff(v.co_value(0, n), best) < 1e-12);
}

TEST_CASE("values along bisection paths equal the shrunken terminal cost") {
  const LinkPair l = links_with(1.0, 1.0);
  const FrameTiming t = timing_with(3);
  const ValueTable v = backward_induction(3, kTwoPi, t, l, {256});
  const double expect = terminal_cost(kTwoPi / 8, kTwoPi / 8, t.comm_time(), l);
  CHECK(rel_diff(v.co_value(0, 256), expect) < 1e-6);
  const IdentityReport r = bisection_identity_report(v, l);
  CHECK(r.states_checked > 0);
  CHECK(r.max_relative_error < 1e-6);
}

TEST_CASE("identity and co-location indifference on the full table") {
  const LinkPair l = links_with(1.2, 0.8);
  const FrameTiming t = timing_with(2);
  DpGrid g;
  g.resolution = 128;
  g.reachable_only = false;
  const ValueTable v = backward_induction(2, kTwoPi, t, l, g);
  const IdentityReport r = bisection_identity_report(v, l);
  CHECK(r.max_relative_error < 1e-6);
  for (int k = 0; k <= 2; ++k) {
    for (int m = 1; 2 * m <= 128; ++m) {
      REQUIRE(v.co_evaluated(k, m));
      REQUIRE(v.sep_evaluated(k, m, m));
      CHECK(rel_diff(v.co_value(k, m), v.sep_value(k, m, m)) < 1e-6);
    }
  }
}

TEST_CASE("bisection optimality holds for symmetric and asymmetric links") {
  for (const auto& l : {links_with(1.0, 1.0), links_with(4.0 / 3, 2.0 / 3), links_with(1.0, 1.0, 80.0)}) {
    for (int slots : {1, 2, 3}) {
      const ValueTable v = backward_induction(slots, kTwoPi, timing_with(slots), l, {128});
      const BisectionReport r = verify_bisection_optimality(v, l, 1e-9);
      CHECK(r.states_checked > 0);
      CHECK(r.passed());
      CHECK(r.max_argmin_offset <= 1.0);
      CHECK(r.max_relative_gap <= 1e-9);
      CHECK(r.max_policy_gap <= 1e-9);
    }
  }
}

TEST_CASE("a perturbed table is reported") {
  const LinkPair l = links_with(1.0, 1.0);
  ValueTable v = backward_induction(2, kTwoPi, timing_with(2), l, {128});
  REQUIRE(verify_bisection_optimality(v, l, 1e-9).passed());

  ValueTable stored = v;
  stored.co_value_ref(0, 128) *= 1.01;
  CHECK_FALSE(verify_bisection_optimality(stored, l, 1e-9).passed());

  // Making an off-centre successor cheap moves the minimizer away from u/2.
  ValueTable shifted = v;
  shifted.co_value_ref(1, 100) *= 0.2;
  const BisectionReport r = verify_bisection_optimality(shifted, l, 1e-9);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(r.violations.empty());
  CHECK_FALSE(r.violations.front().reason.empty());
}

TEST_CASE("separated-state objective is convex in one width") {
  const LinkPair l = links_with(1.0, 1.0);
  const int n = 128;
  DpGrid g;
  g.resolution = n;
  g.reachable_only = false;
  const ValueTable v = backward_induction(2, kTwoPi, timing_with(2), l, g);
  const int k = 1;
  for (int m1 : {20, 40, 64}) {
    for (int m2 : {16, 30, 64}) {
      if (m1 + m2 > n) continue;
      const double scale = v.sep_value(k, m1, m2);
      for (int j2 : {1, m2 / 2, m2 - 1}) {
        for (int j1 = 1; j1 + 1 < m1; ++j1) {
          const double d2 = v.sep_objective(k, m1, m2, j1 + 1, j2) - 2 * v.sep_objective(k, m1, m2, j1, j2) +
                            v.sep_objective(k, m1, m2, j1 - 1, j2);
          CHECK(d2 >= -1e-9 * scale);
        }
      }
    }
  }
}

TEST_CASE("closed form at the reference scenario") {
  const LinkPair l = links_with(1.0, 1.0);
  const FrameTiming t = timing_with(7);
  const double p = closed_form_power(kTwoPi, t, l);
  CHECK(p == doctest::Approx(7.6e-4).epsilon(5e-3));
  CHECK(10 * std::log10(p / 1e-3) == doctest::Approx(-1.19).epsilon(1e-2));
  // Log-domain form: log2 P = log2 sigma - L - log2 gamma + log2(t_cm/t_fr) + log2(2^y - 1).
  const double t_cm = 2e-3 - 7 * 10e-6;
  const double y = 2e-3 * 2.0 / t_cm;
  const double log2p = std::log2(kTwoPi) - 7 - std::log2(l[0].gamma()) + std::log2(t_cm / 2e-3) +
                       y + std::log2(1 - std::pow(2.0, -y));
  CHECK(std::abs(std::log2(p) - log2p) < 1e-12);
  for (int slots = 1; slots <= 7; ++slots) {
    const FrameTiming ts = timing_with(slots);
    CHECK(rel_diff(closed_form_power(kTwoPi, ts, l),
                   closed_form_power_equal_gain(kTwoPi, ts, l[0].gamma(), 2.0)) == 0.0);
  }
}

TEST_CASE("closed form equals the DP root value") {
  for (const auto& l : {links_with(1.0, 1.0), links_with(1.5, 0.5, 70.0)}) {
    const FrameTiming t = timing_with(4);
    const ValueTable v = backward_induction(4, kTwoPi, t, l, {128});
    CHECK(rel_diff(closed_form_power(kTwoPi, t, l), v.co_value(0, 128) / t.frame_s) < 1e-6);
  }
}

TEST_CASE("configuration errors") {
  const LinkPair l = links_with(1.0, 1.0);
  CHECK_THROWS_AS(backward_induction(2, kTwoPi, timing_with(2), l, {64}), ConfigError);
  CHECK_THROWS_AS(backward_induction(11, kTwoPi, timing_with(11), l, {128}), ConfigError);
  FrameTiming t = timing_with(2);
  t.slot_s = 0.99e-3;
  CHECK_THROWS_AS(backward_induction(2, kTwoPi, t, links_with(10.0, 10.0), {128}), InfeasibleError);
}

TEST_CASE("value table csv dump") {
  const LinkPair l = links_with(1.0, 1.0);
  const ValueTable v = backward_induction(1, kTwoPi, timing_with(1), l, {128});
  std::ostringstream os;
  write_value_table_csv(v, os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,u1_frac,u2_frac,rho,value_J,argmin_w1_frac,argmin_w2_frac");
  std::getline(in, line);
  CHECK(line.rfind("0,", 0) == 0);
  std::size_t rows = 1;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6);
  }
  CHECK(rows > 128);
}
