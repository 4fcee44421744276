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

#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamlab/errors.hpp"
#include "beamlab/link_energy.hpp"
#include "test_support.hpp"

using namespace beamlab;
using beamlab::testing::log_space;
using beamlab::testing::reference_energy;
using beamlab::testing::reference_gamma;
using beamlab::testing::rel_diff;

namespace {

const double kLn2 = std::log(2.0);

// Derivatives written from the closed forms in y = t_fr R / tau.
double ref_d1(double tau, double gamma, double rate, double frame) {
  const double y = frame * rate / tau;
  return (std::pow(2.0, y) - 1.0) / gamma - std::pow(2.0, y) * kLn2 * y / gamma;
}

double ref_d2(double tau, double gamma, double rate, double frame) {
  const double y = frame * rate / tau;
  return std::pow(2.0, y) * kLn2 * kLn2 * y * y * y / (gamma * frame * rate);
}

}  // namespace

TEST_CASE("snr factor at the reference scenario") {
  const LinkParams p;
  const double n0 = std::pow(10.0, -20.4);
  CHECK(p.noise_psd_w_per_hz == doctest::Approx(n0).epsilon(1e-15));
  const double g = snr_factor(p);
  CHECK(g == doctest::Approx(reference_gamma(5e-3, 50.0, 2.0, n0, 500e6)).epsilon(1e-14));
  CHECK(g == doctest::Approx(2.0e2).epsilon(2e-3));
}

TEST_CASE("doubling the distance divides gamma by four") {
  LinkParams p;
  const double g = snr_factor(p);
  p.distance_m *= 2;
  CHECK(snr_factor(p) == doctest::Approx(g / 4).epsilon(1e-15));
}

TEST_CASE("gamma in dB matches a log-domain recomputation") {
  const LinkParams p;
  // Every factor converted to dB separately; N0 given as -174 dBm/Hz.
  const double db = 20 * std::log10(p.wavelength_m) - p.path_loss_exponent * 10 * std::log10(p.distance_m) -
                    10 * std::log10(8 * std::acos(-1.0)) - (-174.0 - 30.0) - 10 * std::log10(p.bandwidth_hz);
  CHECK(std::abs(10 * std::log10(snr_factor(p)) - db) < 1e-9);
}

TEST_CASE("energy per radian examples") {
  const EnergyModel e(200.0, 1.0, 2e-3);
  CHECK(e.energy(1e-3) == doctest::Approx(1.5e-5).epsilon(1e-13));
  CHECK(EnergyModel(200.0, 0.0, 2e-3).energy(1e-3) == 0.0);
  CHECK(EnergyModel(200.0, 1e-12, 2e-3).energy(1e-3) > 0.0);
  const LinkParams p;
  CHECK(energy_per_radian(1e-3, p, 2e-3) == doctest::Approx(reference_energy(1e-3, snr_factor(p), 1.0, 2e-3)));
}

TEST_CASE("energy is decreasing on random inputs") {
  Rng rng(41);
  for (int i = 0; i < 10000; ++i) {
    const EnergyModel e(rng.uniform(1, 1e4), rng.uniform(0.1, 20), 2e-3);
    const double tau = std::exp(rng.uniform(std::log(4e-5 * e.rate()), std::log(2e-3)));
    CHECK(e.energy(2 * tau) < e.energy(tau));
  }
}

TEST_CASE("derivatives against central finite differences") {
  const EnergyModel e(200.0, 1.0, 2e-3);
  const double tau = 1e-3;
  const double h = 1e-9;
  const double fd1 = (e.energy(tau + h) - e.energy(tau - h)) / (2 * h);
  const double fd2 = (e.deriv1(tau + h) - e.deriv1(tau - h)) / (2 * h);
  CHECK(rel_diff(fd1, e.deriv1(tau)) < 1e-5);
  CHECK(rel_diff(fd2, e.deriv2(tau)) < 1e-5);
  for (double t : log_space(5e-5, 2e-3, 60)) {
    const double hh = 1e-6 * t;
    CHECK(rel_diff((e.energy(t + hh) - e.energy(t - hh)) / (2 * hh), e.deriv1(t)) < 1e-5);
    CHECK(rel_diff((e.deriv1(t + hh) - e.deriv1(t - hh)) / (2 * hh), e.deriv2(t)) < 1e-5);
  }
}

TEST_CASE("derivatives match the closed forms in y") {
  Rng rng(43);
  for (int i = 0; i < 2000; ++i) {
    const double gamma = rng.uniform(1, 1e4);
    const double rate = rng.uniform(0.1, 20);
    const EnergyModel e(gamma, rate, 2e-3);
    const double tau = std::exp(rng.uniform(std::log(2e-3 * rate / 40), std::log(2e-3)));
    CHECK(rel_diff(e.deriv1(tau), ref_d1(tau, gamma, rate, 2e-3)) < 1e-9);
    CHECK(rel_diff(e.deriv2(tau), ref_d2(tau, gamma, rate, 2e-3)) < 1e-12);
  }
}

TEST_CASE("second derivative positive on a log grid of transmit times") {
  const EnergyModel e = EnergyModel::from_link(LinkParams{}, 2e-3);
  for (double t : log_space(1e-6, 2e-3, 400)) CHECK(e.deriv2(t) > 0.0);
}

TEST_CASE("first derivative tends to zero from below as the rate vanishes") {
  const EnergyModel e(200.0, 1e-9, 2e-3);
  const double d = e.deriv1(1e-3);
  CHECK(d < 0.0);
  CHECK(std::abs(d) < 1e-15);
  // Leading term: -(ln2 y)^2 / (2 gamma).
  const double a = kLn2 * 2e-3 * 1e-9 / 1e-3;
  CHECK(d == doctest::Approx(-a * a / 2 / 200.0).epsilon(1e-6));
}

TEST_CASE("signs hold over a randomized parameter sweep") {
  Rng rng(47);
  for (int i = 0; i < 20000; ++i) {
    const EnergyModel e(rng.uniform(1, 1e4), rng.uniform(0.1, 20), 2e-3);
    // Any tau in (0, t_fr] whose exponent stays below the overflow guard.
    const double lo = 2e-3 * e.rate() / kMaxRateExponent;
    const double tau = std::exp(rng.uniform(std::log(lo), std::log(2e-3)));
    CHECK(e.deriv1(tau) < 0.0);
    CHECK(e.deriv2(tau) > 0.0);
  }
}

TEST_CASE("overflow guard and domain errors") {
  const EnergyModel e(200.0, 1.0, 2e-3);
  const double tiny = 2e-3 / 2000;
  CHECK(e.energy(tiny) == std::numeric_limits<double>::infinity());
  CHECK(e.deriv1(tiny) == -std::numeric_limits<double>::infinity());
  CHECK(e.deriv2(tiny) == std::numeric_limits<double>::infinity());
  CHECK(std::isfinite(e.energy(2e-3 / 1000)));
  CHECK_THROWS_AS(e.energy(0.0), std::domain_error);
  CHECK_THROWS_AS(e.deriv1(-1.0), std::domain_error);
  CHECK_THROWS_AS(e.deriv2(0.0), std::domain_error);
}

TEST_CASE("power and realized rate invert each other") {
  Rng rng(53);
  for (int i = 0; i < 1000; ++i) {
    const EnergyModel e(rng.uniform(1, 1e4), rng.uniform(0.1, 10), 2e-3);
    const double tau = rng.uniform(2e-4, 2e-3);
    const double w = rng.uniform(0.01, 6);
    const double p = e.power(tau, w);
    CHECK(rel_diff(e.realized_rate(tau, p, w), e.rate()) < 1e-12);
    CHECK(rel_diff(p * tau, w * e.energy(tau)) < 1e-12);
  }
}

TEST_CASE("excess exponential series and direct forms agree") {
  for (double y : log_space(1e-8, 40, 300)) {
    const double a = kLn2 * y;
    const double direct = a - 1 + std::exp(-a);
    const double v = excess_exponential(y);
    CHECK(v > 0.0);
    if (a > 1e-3) CHECK(rel_diff(v, direct) < 1e-9);
    if (a < 1e-4) CHECK(rel_diff(v, a * a / 2 - a * a * a / 6) < 1e-8);
  }
}

TEST_CASE("convexity margin positive on the 200 x 200 log grid") {
  const auto ys = log_space(0.01, 30, 200);
  for (double ratio : {0.25, 1.0, 2.0, 4.0}) {
    std::size_t failures = 0;
    for (double y1 : ys) {
      for (double y2 : ys) failures += convexity_margin(y1, y2, ratio) > 0.0 ? 0 : 1;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("curvature expression positive at arbitrary transmit-time pairs") {
  // Evaluated from the reference derivatives, independently of the margin q.
  const double gamma = 200.0;
  const double frame = 2e-3;
  const auto ys = log_space(0.01, 30, 60);
  for (double r2 : {0.25, 1.0, 3.0}) {
    const double r1 = 1.0;
    for (double y1 : ys) {
      for (double y2 : ys) {
        const double t1 = frame * r1 / y1;
        const double t2 = frame * r2 / y2;
        const double e1 = reference_energy(t1, gamma, r1, frame);
        const double v = convexity_expression(e1, ref_d1(t1, gamma, r1, frame), ref_d2(t1, gamma, r1, frame),
                                              ref_d1(t2, gamma, r2, frame), ref_d2(t2, gamma, r2, frame));
        CHECK(v > 0.0);
        CHECK(convexity_margin(y1, y2, r1 / r2) > 0.0);
      }
    }
  }
}

TEST_CASE("a wrong-sign curvature breaks the expression") {
  const EnergyModel e(200.0, 1.0, 2e-3);
  const double t = 1e-3;
  // eps'' of the wrong sign makes every curvature term negative.
  CHECK(convexity_expression(e.energy(t), e.deriv1(t), -e.deriv2(t), e.deriv1(t), -e.deriv2(t)) < 0.0);
}

TEST_CASE("parameter validation") {
  LinkParams p;
  CHECK_NOTHROW(p.validate());
  p.distance_m = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = LinkParams{};
  CHECK_THROWS_AS(p.validate(40.0), ConfigError);
  p.rate_bps_per_hz = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  FrameTiming t;
  CHECK_NOTHROW(t.validate());
  CHECK(t.comm_time() == doctest::Approx(2e-3 - 7e-5));
  t.beacon_s = t.slot_s;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  t = FrameTiming{};
  t.slots = 200;
  CHECK_THROWS_AS(t.validate(), ConfigError);
  CHECK_THROWS_AS(EnergyModel(0.0, 1.0, 2e-3), ConfigError);
}
