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

#ifndef BEAMLAB_SIM_HARNESS_HPP
#define BEAMLAB_SIM_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "beamlab/protocols.hpp"

namespace beamlab {

/// Everything a trial needs besides its seed.
struct TrialParams {
  double sigma = kTwoPi;
  FrameTiming timing;  ///< timing.slots is the joint-bisection depth
  LinkPair links = make_link_pair(LinkParams{}, LinkParams{}, FrameTiming{}.frame_s);
  int depth1 = 7;  ///< exhaustive depth, or l1 for single-user
  int depth2 = 7;  ///< l2 for single-user
};

struct TrialRecord {
  std::uint64_t seed = 0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  int slots_used = 0;
  double tau1 = 0.0;
  double energy_j = 0.0;
  double power_w = 0.0;
  bool feasible = true;
  std::vector<bool> rho_trajectory;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct TrialStats {
  std::size_t n = 0;
  std::size_t infeasible = 0;
  double mean_power_w = 0.0;
  double stderr_w = 0.0;  ///< sample standard deviation / sqrt(n)
  std::vector<TrialRecord> records;
};

struct RunOptions {
  int threads = 0;  ///< 0: BEAMLAB_THREADS or hardware
  bool keep_records = false;
};

/// One frame of `scheme` with the trial's own generator.
TrialRecord run_trial(Scheme scheme, const TrialParams& params, std::uint64_t seed);

/**
 * n independent trials seeded by trial_seed(master_seed, i). Results do not
 * depend on the worker count: trials are filled in parallel and reduced in
 * index order. Throws InfeasibleError naming the parameters if any trial is
 * infeasible, std::invalid_argument for n = 0.
 */
TrialStats run_trials(Scheme scheme, const TrialParams& params, std::size_t n, std::uint64_t master_seed,
                      const RunOptions& options = {});

struct SweepRow {
  Scheme scheme = Scheme::joint_bisection;
  double r_tot = 0.0;
  double psi = 1.0;
  int depth1 = 0;
  int depth2 = 0;
  double mean_power_w = 0.0;
  double mean_power_dbm = 0.0;
  double stderr_w = 0.0;
  std::size_t n_trials = 0;
  std::optional<double> closed_form_w;
  bool feasible = true;
  std::string note;  ///< diagnostic for infeasible rows
};

struct SweepConfig {
  std::vector<Scheme> schemes{Scheme::joint_bisection, Scheme::joint_exhaustive, Scheme::single_user};
  std::vector<double> r_tot;
  double psi = 0.5;
  double sigma = kTwoPi;
  FrameTiming timing;
  LinkParams user1;
  LinkParams user2;
  int depth_cap = 7;
  std::size_t trials = 100000;
  std::uint64_t master_seed = 1;
  int threads = 0;
};

/// Rates for a sum rate and ratio psi = R2 / R1, with R1 + R2 == r_tot exactly.
std::pair<double, double> split_rate(double r_tot, double psi);

double watts_to_dbm(double watts);

/// Depth-optimized rows for every (scheme, R_tot); infeasible rows are marked and the sweep continues.
std::vector<SweepRow> sweep(const SweepConfig& config);

/// Header: scheme,r_tot,psi,depth1,depth2,mean_power_w,mean_power_dbm,stderr_w,n_trials,closed_form_w
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

inline constexpr const char* kSweepCsvHeader =
    "scheme,r_tot,psi,depth1,depth2,mean_power_w,mean_power_dbm,stderr_w,n_trials,closed_form_w";

}  // namespace beamlab

#endif  // BEAMLAB_SIM_HARNESS_HPP
