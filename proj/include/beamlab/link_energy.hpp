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

#ifndef BEAMLAB_LINK_ENERGY_HPP
#define BEAMLAB_LINK_ENERGY_HPP

#include <array>
#include <limits>

namespace beamlab {

/// Per-user radio constants. All quantities SI.
struct LinkParams {
  double wavelength_m = 5e-3;
  double distance_m = 50.0;
  double path_loss_exponent = 2.0;
  double noise_psd_w_per_hz = 3.981071705534973e-21;  // -174 dBm/Hz
  double bandwidth_hz = 500e6;
  double rate_bps_per_hz = 1.0;  ///< spectral-efficiency demand R

  /// Throws ConfigError on non-positive fields; `max_distance_m` <= 0 disables the range check.
  void validate(double max_distance_m = 0.0) const;

  friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

/// Frame layout: `slots` beacon slots of `slot_s` each, then data until `frame_s`.
struct FrameTiming {
  double frame_s = 2e-3;
  double slot_s = 10e-6;
  double beacon_s = 5e-6;
  int slots = 7;

  double alignment_time() const { return slots * slot_s; }
  double comm_time() const { return frame_s - alignment_time(); }

  /// Copy with a different number of alignment slots.
  FrameTiming with_slots(int l) const {
    FrameTiming t = *this;
    t.slots = l;
    return t;
  }

  void validate() const;

  friend bool operator==(const FrameTiming&, const FrameTiming&) = default;
};

/// SNR scaling factor gamma = lambda^2 d^-alpha / (8 pi N0 W), in 1/W.
double snr_factor(const LinkParams& p);

/// Largest exponent t_fr R / tau evaluated before reporting the sentinel.
inline constexpr double kMaxRateExponent = 1024.0;

/// Returned when 2^(t_fr R / tau) would overflow; callers treat it as infeasible.
inline constexpr double kInfeasibleEnergy = std::numeric_limits<double>::infinity();

/**
 * Energy per radian of beam-width needed to deliver spectral efficiency R,
 * averaged over a frame of length t_fr, when transmitting for tau seconds:
 *
 *   eps(tau) = tau (2^(t_fr R / tau) - 1) / gamma.
 *
 * eps is positive, strictly decreasing and strictly convex in tau for R > 0.
 * Small exponents go through expm1 so eps' keeps its sign as R -> 0.
 */
class EnergyModel {
 public:
  EnergyModel(double gamma, double rate, double frame_s);
  static EnergyModel from_link(const LinkParams& p, double frame_s);

  double gamma() const { return gamma_; }
  double rate() const { return rate_; }
  double frame_s() const { return frame_s_; }

  /// Copy with a different rate demand (used for the doubled single-user rate).
  EnergyModel with_rate(double rate) const { return {gamma_, rate, frame_s_}; }

  /// Exponent y = t_fr R / tau.
  double exponent(double tau) const;

  double energy(double tau) const;
  double deriv1(double tau) const;
  double deriv2(double tau) const;

  /// Transmit power needed over tau seconds when spread over `beamwidth` rad.
  double power(double tau, double beamwidth) const;

  /// Spectral efficiency realized with `power` over tau seconds, averaged over the frame.
  double realized_rate(double tau, double power, double beamwidth) const;

 private:
  double gamma_;
  double rate_;
  double frame_s_;
};

using LinkPair = std::array<EnergyModel, 2>;

LinkPair make_link_pair(const LinkParams& user1, const LinkParams& user2, double frame_s);

// Free-function forms of the energy model.
double energy_per_radian(double tau, const LinkParams& p, double frame_s);
double energy_deriv1(double tau, const LinkParams& p, double frame_s);
double energy_deriv2(double tau, const LinkParams& p, double frame_s);

/// ln(2) y - 1 + 2^-y, computed without cancellation for small y.
double excess_exponential(double y);

/**
 * Convexity margin q(y1, y2) of the per-axis terminal cost, with
 * y_i = t_fr R_i / tau_i and `rate_ratio` = R1 / R2. Positive everywhere.
 */
double convexity_margin(double y1, double y2, double rate_ratio);

/// -2 e1 e1' e2'' - 2 e1 e1'' e2' + e2' (e1')^2; positive at matched tau values.
double convexity_expression(double e1, double e1_d1, double e1_d2, double e2_d1, double e2_d2);

}  // namespace beamlab

#endif  // BEAMLAB_LINK_ENERGY_HPP
