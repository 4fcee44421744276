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

#ifndef BEAMLAB_CLI_HPP
#define BEAMLAB_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "beamlab/sim_harness.hpp"

namespace beamlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitVerification = 3,
};

/**
 * Experiment description. The file format is flat `key = value` lines with
 * `#` comments; numbers are SI unless they carry a unit suffix
 * (s, ms, us, ns; m, mm, cm, km; Hz, kHz, MHz, GHz; rad, pi; W/Hz, dBm/Hz).
 */
struct ExperimentConfig {
  double frame_s = 2e-3;
  double slot_s = 10e-6;
  double beacon_s = 5e-6;
  int slots = 7;  ///< depth used by trace and by the fixed-depth verify checks
  double sigma = kTwoPi;
  double wavelength_m = 5e-3;
  double distance1_m = 50.0;
  double distance2_m = 50.0;
  double path_loss_exponent = 2.0;
  double noise_psd_w_per_hz = 3.981071705534973e-21;
  double bandwidth_hz = 500e6;
  int depth_cap = 7;
  std::vector<Scheme> schemes{Scheme::joint_bisection, Scheme::joint_exhaustive, Scheme::single_user};
  std::vector<double> r_tot = default_rate_grid();
  double psi = 0.5;
  double eval_r_tot = 2.0;  ///< sum rate for trace and verify
  std::size_t trials = 100000;
  std::uint64_t master_seed = 1;
  std::string output = "sweep.csv";
  int threads = 0;
  int dp_resolution = 256;

  static std::vector<double> default_rate_grid();

  FrameTiming timing() const;
  /// Per-user parameters at sum rate r_tot split by psi.
  LinkPair links(double r_tot) const;
  SweepConfig sweep_config() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Sets one field from its text form; throws ConfigError("key: ...") on bad input.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` text on top of `base`. Errors carry source and line number.
ExperimentConfig parse_config(std::istream& in, std::string_view source, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Writes every field with exact SI values so that parsing the text restores the config.
std::string serialize_config(const ExperimentConfig& cfg);

/// Parses "a,b,c" or "start:step:stop".
std::vector<double> parse_rate_grid(std::string_view text);

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  /// Replaces eps'' by its negation inside the curvature checks (negative control).
  bool inject_curvature_fault = false;
  /// Skips the DP checks (slow at full resolution).
  bool skip_dp = false;
};

/// Runs the verification suite; prints one PASS/FAIL line per check.
int cmd_verify(const ExperimentConfig& cfg, const VerifyOptions& options, std::ostream& out);

/// Step-by-step record of one frame of `scheme` drawn from `seed`.
int cmd_trace(const ExperimentConfig& cfg, Scheme scheme, std::uint64_t seed, std::ostream& out);

}  // namespace beamlab

#endif  // BEAMLAB_CLI_HPP
