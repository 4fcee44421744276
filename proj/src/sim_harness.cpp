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

#include "beamlab/sim_harness.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "beamlab/dp_planner.hpp"
#include "beamlab/errors.hpp"
#include "beamlab/parallel.hpp"

namespace beamlab {

TrialRecord run_trial(Scheme scheme, const TrialParams& params, std::uint64_t seed) {
  Rng rng(seed);
  const GroundTruth gt = draw_ground_truth(params.sigma, rng);
  TrialRecord rec;
  rec.seed = seed;
  rec.theta1 = gt.theta1;
  rec.theta2 = gt.theta2;
  switch (scheme) {
    case Scheme::joint_bisection:
    case Scheme::joint_exhaustive: {
      FrameOutcome f = scheme == Scheme::joint_bisection
                           ? joint_bisection_frame(gt, params.sigma, params.timing, params.links)
                           : exhaustive_protocol(gt, {params.depth1, params.sigma}, params.timing, params.links);
      rec.slots_used = f.slots_used;
      rec.feasible = f.feasible;
      rec.tau1 = f.schedule.tau1;
      rec.energy_j = f.energy_j;
      rec.power_w = f.power_w;
      rec.rho_trajectory = std::move(f.co_located_trajectory);
      break;
    }
    case Scheme::single_user: {
      const SingleUserOutcome s =
          single_user_protocol(gt, {params.depth1, params.depth2}, params.sigma, params.timing, params.links);
      rec.slots_used = s.slots[0] + s.slots[1];
      rec.tau1 = params.timing.frame_s - s.slots[0] * params.timing.slot_s;
      rec.energy_j = s.energy_j[0] + s.energy_j[1];
      rec.power_w = s.power_w;
      break;
    }
  }
  return rec;
}

TrialStats run_trials(Scheme scheme, const TrialParams& params, std::size_t n, std::uint64_t master_seed,
                      const RunOptions& options) {
  if (n == 0) throw std::invalid_argument("run_trials: need at least one trial");
  std::vector<TrialRecord> records(n);
  parallel_for(n, resolve_threads(options.threads),
               [&](std::size_t i) { records[i] = run_trial(scheme, params, trial_seed(master_seed, i)); });

  TrialStats stats;
  stats.n = n;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const TrialRecord& r = records[i];
    if (!r.feasible) {
      ++stats.infeasible;
      continue;
    }
    // Welford update, in trial order so the result is independent of scheduling.
    const double count = static_cast<double>(i + 1 - stats.infeasible);
    const double delta = r.power_w - mean;
    mean += delta / count;
    m2 += delta * (r.power_w - mean);
  }
  if (stats.infeasible > 0) {
    std::ostringstream msg;
    msg << scheme_name(scheme) << ": " << stats.infeasible << " of " << n
        << " frames infeasible (R1=" << params.links[0].rate() << ", R2=" << params.links[1].rate()
        << " bps/Hz, depth " << (scheme == Scheme::joint_bisection ? params.timing.slots : params.depth1) << ")";
    throw InfeasibleError(msg.str());
  }
  stats.mean_power_w = mean;
  stats.stderr_w = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  if (options.keep_records) stats.records = std::move(records);
  return stats;
}

std::pair<double, double> split_rate(double r_tot, double psi) {
  if (!(r_tot > 0.0) || !std::isfinite(r_tot)) throw ConfigError("sum rate must be positive");
  if (!(psi > 0.0 && psi <= 1.0)) throw ConfigError("psi must lie in (0, 1]");
  const double r1 = r_tot / (1.0 + psi);
  // r_tot - r1 is exact since r1 lies in [r_tot/2, r_tot].
  return {r1, r_tot - r1};
}

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

std::vector<SweepRow> sweep(const SweepConfig& config) {
  if (config.r_tot.empty()) throw ConfigError("sum-rate grid is empty");
  if (config.schemes.empty()) throw ConfigError("scheme list is empty");
  if (config.trials == 0) throw ConfigError("trials must be at least 1");
  config.timing.validate();
  std::vector<SweepRow> rows;
  for (Scheme scheme : config.schemes) {
    for (double r_tot : config.r_tot) {
      SweepRow row;
      row.scheme = scheme;
      row.r_tot = r_tot;
      row.psi = config.psi;
      try {
        const auto [r1, r2] = split_rate(r_tot, config.psi);
        LinkParams p1 = config.user1;
        LinkParams p2 = config.user2;
        p1.rate_bps_per_hz = r1;
        p2.rate_bps_per_hz = r2;
        TrialParams tp;
        tp.sigma = config.sigma;
        tp.links = make_link_pair(p1, p2, config.timing.frame_s);
        const DepthChoice best = optimize_depth(scheme, config.depth_cap, config.sigma, config.timing, tp.links);
        row.depth1 = best.depth1;
        row.depth2 = best.depth2;
        tp.timing = config.timing.with_slots(scheme == Scheme::joint_bisection ? best.depth1 : config.timing.slots);
        tp.depth1 = best.depth1;
        tp.depth2 = best.depth2;
        if (scheme == Scheme::single_user) {
          row.mean_power_w = best.power_w;
          row.n_trials = 0;
        } else {
          const TrialStats st = run_trials(scheme, tp, config.trials, config.master_seed, {config.threads, false});
          row.mean_power_w = st.mean_power_w;
          row.stderr_w = st.stderr_w;
          row.n_trials = st.n;
          if (scheme == Scheme::joint_bisection) row.closed_form_w = best.power_w;
        }
        row.mean_power_dbm = watts_to_dbm(row.mean_power_w);
      } catch (const InfeasibleError& e) {
        row.feasible = false;
        row.note = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << kSweepCsvHeader << '\n';
  char buf[512];
  for (const SweepRow& r : rows) {
    const std::string name(scheme_name(r.scheme));
    if (!r.feasible) {
      // Infeasible rows keep their coordinates; value columns stay empty.
      std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,,,,,,0,\n", name.c_str(), r.r_tot, r.psi);
      os << buf;
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.10g,%d,%d,%.10g,%.10g,%.10g,%zu,", name.c_str(), r.r_tot, r.psi,
                  r.depth1, r.depth2, r.mean_power_w, r.mean_power_dbm, r.stderr_w, r.n_trials);
    os << buf;
    if (r.closed_form_w) {
      std::snprintf(buf, sizeof(buf), "%.10g", *r.closed_form_w);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace beamlab
