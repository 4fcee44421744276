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

#include "beamlab/link_energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "beamlab/errors.hpp"

namespace beamlab {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(name) + " must be positive and finite");
  }
}

// expm1(a) - a e^a, the numerator of gamma * eps'. Series below 0.1 where the
// two terms nearly cancel: sum_{n>=2} a^n (1 - n) / n!.
double slope_numerator(double a) {
  if (a < 0.1) {
    double term = a;  // a^n / n! at n = 1
    double sum = 0.0;
    for (int n = 2; n <= 16; ++n) {
      term *= a / n;
      sum += term * (1 - n);
    }
    return sum;
  }
  return std::expm1(a) - a * std::exp(a);
}

void require_tau(double tau) {
  if (!(tau > 0.0)) throw std::domain_error("energy model: tau must be positive");
}

}  // namespace

void LinkParams::validate(double max_distance_m) const {
  require_positive(wavelength_m, "wavelength");
  require_positive(distance_m, "distance");
  require_positive(path_loss_exponent, "path_loss_exponent");
  require_positive(noise_psd_w_per_hz, "noise_psd");
  require_positive(bandwidth_hz, "bandwidth");
  if (!(rate_bps_per_hz >= 0.0) || !std::isfinite(rate_bps_per_hz)) {
    throw ConfigError("rate must be non-negative and finite");
  }
  if (max_distance_m > 0.0 && distance_m > max_distance_m) {
    throw ConfigError("distance exceeds the cell radius");
  }
}

void FrameTiming::validate() const {
  require_positive(frame_s, "frame");
  require_positive(slot_s, "slot");
  require_positive(beacon_s, "beacon");
  if (!(beacon_s < slot_s)) throw ConfigError("beacon must be shorter than the slot");
  if (slots < 0) throw ConfigError("slots must be non-negative");
  if (!(comm_time() > 0.0)) throw ConfigError("alignment slots leave no time for data");
}

double snr_factor(const LinkParams& p) {
  return p.wavelength_m * p.wavelength_m * std::pow(p.distance_m, -p.path_loss_exponent) /
         (8.0 * std::numbers::pi * p.noise_psd_w_per_hz * p.bandwidth_hz);
}

EnergyModel::EnergyModel(double gamma, double rate, double frame_s)
    : gamma_(gamma), rate_(rate), frame_s_(frame_s) {
  require_positive(gamma, "gamma");
  require_positive(frame_s, "frame");
  if (!(rate >= 0.0)) throw ConfigError("rate must be non-negative");
}

EnergyModel EnergyModel::from_link(const LinkParams& p, double frame_s) {
  return {snr_factor(p), p.rate_bps_per_hz, frame_s};
}

double EnergyModel::exponent(double tau) const { return frame_s_ * rate_ / tau; }

double EnergyModel::energy(double tau) const {
  require_tau(tau);
  const double y = exponent(tau);
  if (y > kMaxRateExponent) return kInfeasibleEnergy;
  return tau * std::expm1(y * kLn2) / gamma_;
}

double EnergyModel::deriv1(double tau) const {
  require_tau(tau);
  const double y = exponent(tau);
  if (y > kMaxRateExponent) return -kInfeasibleEnergy;
  return slope_numerator(y * kLn2) / gamma_;
}

double EnergyModel::deriv2(double tau) const {
  require_tau(tau);
  const double y = exponent(tau);
  if (y > kMaxRateExponent) return kInfeasibleEnergy;
  // 2^y ln2^2 y^3 / (gamma t_fr R), with y / (t_fr R) = 1 / tau.
  return std::exp2(y) * kLn2 * kLn2 * y * y / (gamma_ * tau);
}

double EnergyModel::power(double tau, double beamwidth) const {
  require_tau(tau);
  const double y = exponent(tau);
  if (y > kMaxRateExponent) return kInfeasibleEnergy;
  return beamwidth / gamma_ * std::expm1(y * kLn2);
}

double EnergyModel::realized_rate(double tau, double power, double beamwidth) const {
  return tau / frame_s_ * std::log1p(gamma_ * power / beamwidth) / kLn2;
}

LinkPair make_link_pair(const LinkParams& user1, const LinkParams& user2, double frame_s) {
  return {EnergyModel::from_link(user1, frame_s), EnergyModel::from_link(user2, frame_s)};
}

double energy_per_radian(double tau, const LinkParams& p, double frame_s) {
  return EnergyModel::from_link(p, frame_s).energy(tau);
}

double energy_deriv1(double tau, const LinkParams& p, double frame_s) {
  return EnergyModel::from_link(p, frame_s).deriv1(tau);
}

double energy_deriv2(double tau, const LinkParams& p, double frame_s) {
  return EnergyModel::from_link(p, frame_s).deriv2(tau);
}

double excess_exponential(double y) {
  const double a = y * kLn2;
  if (a < 1e-2) {
    // a + expm1(-a) = sum_{n>=2} (-a)^n / n!
    double term = -a;
    double sum = 0.0;
    for (int n = 2; n <= 14; ++n) {
      term *= -a / n;
      sum += term;
    }
    return sum;
  }
  return a + std::expm1(-a);
}

double convexity_margin(double y1, double y2, double rate_ratio) {
  const double ln2sq = kLn2 * kLn2;
  const double p2 = std::exp2(y2);
  const double e1 = excess_exponential(y1);
  const double e2 = excess_exponential(y2);
  const double one_minus = -std::expm1(-y1 * kLn2);  // 1 - 2^-y1
  return p2 * e2 * 2.0 * one_minus * ln2sq * y1 * y1 - p2 * e2 * e1 * e1 +
         2.0 * rate_ratio * one_minus * e1 * ln2sq * p2 * y2 * y2 * y2 / y1;
}

double convexity_expression(double e1, double e1_d1, double e1_d2, double e2_d1, double e2_d2) {
  return -2.0 * e1 * e1_d1 * e2_d2 - 2.0 * e1 * e1_d2 * e2_d1 + e2_d1 * e1_d1 * e1_d1;
}

}  // namespace beamlab
