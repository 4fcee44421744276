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

#include "beamlab/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "beamlab/dp_planner.hpp"
#include "beamlab/errors.hpp"

namespace beamlab {

namespace {

constexpr double kDepthTieTolerance = 1e-12;

void check_slots(int slots) {
  if (slots < 0) throw ConfigError("number of alignment slots must be non-negative");
}

void cross_check(const BeliefState& geo, const BeliefState& stat, int slot) {
  const double tol = 1e-10 * std::max(1.0, std::max(stat.u1, stat.u2));
  if (std::abs(geo.u1 - stat.u1) > tol || std::abs(geo.u2 - stat.u2) > tol || geo.co_located != stat.co_located) {
    std::ostringstream msg;
    msg << "slot " << slot << ": geometry (" << geo.u1 << ", " << geo.u2 << ", " << geo.co_located
        << ") disagrees with statistic (" << stat.u1 << ", " << stat.u2 << ", " << stat.co_located << ")";
    throw InconsistencyError(msg.str());
  }
}

FrameOutcome schedule_frame(double u1, double u2, double t_cm, double frame_s, const LinkPair& links) {
  FrameOutcome out;
  if (!(t_cm > 0.0)) {
    out.feasible = false;
    return out;
  }
  try {
    out.schedule = make_schedule(u1, u2, t_cm, links);
  } catch (const InfeasibleError&) {
    out.feasible = false;
    return out;
  }
  out.energy_j = out.schedule.energy_total;
  out.power_w = out.energy_j / frame_s;
  return out;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::joint_bisection:
      return "joint-bisection";
    case Scheme::joint_exhaustive:
      return "joint-exhaustive";
    case Scheme::single_user:
      return "single-user";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::joint_bisection, Scheme::joint_exhaustive, Scheme::single_user}) {
    if (name == scheme_name(s)) return s;
  }
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected joint-bisection, joint-exhaustive or single-user)");
}

Policy bisection_policy() {
  return {"bisection", [](const BeliefState& s, int) { return BeamWidths{0.5 * s.u1, 0.5 * s.u2}; }};
}

Policy fraction_policy(std::vector<double> fractions) {
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("scan fractions must lie in [0, 1]");
  }
  return {"fraction", [fr = std::move(fractions)](const BeliefState& s, int slot) {
            const double f = fr.empty() ? 0.5 : fr[static_cast<std::size_t>(slot) % fr.size()];
            return BeamWidths{f * s.u1, f * s.u2};
          }};
}

AlignmentRun run_alignment(const Policy& policy, int slots, double sigma, const GroundTruth& truth,
                           const AlignmentOptions& options, Rng* rng) {
  check_slots(slots);
  const bool geometric = options.geometry == Geometry::explicit_supports;
  if (!geometric && rng == nullptr) throw ConfigError("statistic-only alignment needs a random generator");

  BeliefState stat = initial_state(sigma, false);
  BeliefState geo = geometric ? initial_state(sigma, true) : BeliefState{};
  if (geometric && !(geo.supports->at(0).contains(truth.theta1) && geo.supports->at(1).contains(truth.theta2))) {
    throw ConfigError("ground truth lies outside the prior support");
  }

  AlignmentRun run;
  run.co_located_trajectory.reserve(static_cast<std::size_t>(slots) + 1);
  run.co_located_trajectory.push_back(stat.co_located);
  for (int k = 0; k < slots; ++k) {
    const BeamWidths w = policy.action(stat, k);
    Feedback fb;
    ArcSet beam;
    if (geometric) {
      beam = realize_beam(geo, w.w1, w.w2, options.placement);
      fb = feedback(truth, beam);
      geo = update_supports(geo, beam, fb);
    } else {
      fb = sample_feedback(stat, w.w1, w.w2, *rng);
    }
    stat = transition(stat, w.w1, w.w2, fb);
    if (geometric) cross_check(geo, stat, k);
    run.co_located_trajectory.push_back(stat.co_located);
    if (options.record_trace) run.trace.push_back({k, std::move(beam), w, fb, stat});
  }
  run.final_state = stat;
  return run;
}

FrameOutcome joint_bisection_frame(const GroundTruth& truth, double sigma, const FrameTiming& timing,
                                   const LinkPair& links, bool record_trace) {
  AlignmentOptions opt;
  opt.record_trace = record_trace;
  AlignmentRun run = run_alignment(bisection_policy(), timing.slots, sigma, truth, opt);
  FrameOutcome out = schedule_frame(run.final_state.u1, run.final_state.u2, timing.comm_time(), timing.frame_s, links);
  out.slots_used = timing.slots;
  out.co_located_trajectory = std::move(run.co_located_trajectory);
  out.trace = std::move(run.trace);
  return out;
}

void ExhaustiveConfig::validate() const {
  if (depth < 0 || depth > 20) throw ConfigError("exhaustive depth must lie in [0, 20]");
  if (!(sigma > 0.0 && sigma <= kTwoPi)) throw ConfigError("exhaustive sector must lie in (0, 2 pi]");
}

ArcSet exhaustive_beam(const ExhaustiveConfig& cfg, int index) {
  cfg.validate();
  const int k = cfg.beams();
  if (index < 1 || index > k) throw std::out_of_range("exhaustive beam index outside 1..K");
  const double lo = -0.5 * cfg.sigma + (index - 1) * cfg.beam_width();
  const double hi = index == k ? 0.5 * cfg.sigma : -0.5 * cfg.sigma + index * cfg.beam_width();
  return ArcSet::interval(lo, hi);
}

int exhaustive_cell(const ExhaustiveConfig& cfg, double theta) {
  cfg.validate();
  const int k = cfg.beams();
  const double x = (theta + 0.5 * cfg.sigma) / cfg.beam_width();
  if (!(x >= 0.0 && x < k + 1e-9)) throw std::out_of_range("angle outside the scanned sector");
  int j = static_cast<int>(std::floor(x)) + 1;
  j = std::clamp(j, 1, k);
  // Resolve floating-point disagreements at cell edges against the beam itself.
  if (!exhaustive_beam(cfg, j).contains(theta)) {
    if (j > 1 && exhaustive_beam(cfg, j - 1).contains(theta)) return j - 1;
    if (j < k && exhaustive_beam(cfg, j + 1).contains(theta)) return j + 1;
  }
  return j;
}

FrameOutcome exhaustive_protocol(const GroundTruth& truth, const ExhaustiveConfig& cfg, const FrameTiming& timing,
                                 const LinkPair& links) {
  cfg.validate();
  // Scan in index order; each user ACKs exactly once, the scan stops when both have.
  int id1 = 0;
  int id2 = 0;
  int used = 0;
  for (int j = 1; j <= cfg.beams() && (id1 == 0 || id2 == 0); ++j) {
    const Feedback fb = feedback(truth, exhaustive_beam(cfg, j));
    if (fb.ack1 && id1 == 0) id1 = j;
    if (fb.ack2 && id2 == 0) id2 = j;
    used = j;
  }
  if (id1 == 0 || id2 == 0) throw ConfigError("ground truth lies outside the scanned sector");
  const double t_cm = timing.frame_s - used * timing.slot_s;
  const double w = cfg.beam_width();
  FrameOutcome out = schedule_frame(w, w, t_cm, timing.frame_s, links);
  out.slots_used = used;
  return out;
}

double exhaustive_expected_power(const ExhaustiveConfig& cfg, const FrameTiming& timing, const LinkPair& links) {
  cfg.validate();
  const int k = cfg.beams();
  const double w = cfg.beam_width();
  const double k2 = static_cast<double>(k) * k;
  double total = 0.0;
  for (int m = 1; m <= k; ++m) {
    // P(max(id1, id2) = m) for independent uniform cell indices.
    const double p = (static_cast<double>(m) * m - static_cast<double>(m - 1) * (m - 1)) / k2;
    const double t_cm = timing.frame_s - m * timing.slot_s;
    if (!(t_cm > 0.0)) throw InfeasibleError("exhaustive scan of " + std::to_string(m) + " beams fills the frame");
    total += p * terminal_cost(w, w, t_cm, links);
  }
  return total / timing.frame_s;
}

namespace {

/// Bisection of one user's support; the other user is silent.
std::pair<double, std::vector<SlotRecord>> single_user_alignment(int user, int slots, double sigma, double theta,
                                                                 bool record_trace) {
  ArcSet support = sigma >= kTwoPi ? ArcSet::full() : ArcSet::interval(-sigma / 2, sigma / 2);
  double u = sigma;
  std::vector<SlotRecord> trace;
  for (int k = 0; k < slots; ++k) {
    const double w = 0.5 * u;
    ArcSet beam = take_measured_subset(support, w);
    const bool ack = beam.contains(theta);
    support = ack ? intersect(support, beam) : difference(support, beam);
    u = ack ? w : u - w;
    if (std::abs(support.measure() - u) > 1e-10 * std::max(1.0, u)) {
      throw InconsistencyError("single-user support measure drifted from the bisection width");
    }
    if (record_trace) {
      SlotRecord rec;
      rec.slot = k;
      rec.beam = std::move(beam);
      rec.widths = user == 0 ? BeamWidths{w, 0.0} : BeamWidths{0.0, w};
      rec.fb = user == 0 ? Feedback{ack, false} : Feedback{false, ack};
      rec.after.u1 = user == 0 ? u : sigma;
      rec.after.u2 = user == 0 ? sigma : u;
      rec.after.co_located = false;
      trace.push_back(std::move(rec));
    }
  }
  return {u, std::move(trace)};
}

double single_user_frame_energy(int user, int slots, double width, const FrameTiming& timing, const LinkPair& links) {
  const double t_cm = timing.frame_s - slots * timing.slot_s;
  if (!(t_cm > 0.0)) throw InfeasibleError("single-user alignment fills the frame");
  const EnergyModel doubled = links[user].with_rate(2.0 * links[user].rate());
  const double e = width * doubled.energy(t_cm);
  if (!std::isfinite(e)) {
    std::ostringstream msg;
    msg << "single-user rate " << 2.0 * links[user].rate() << " bps/Hz for user " << user + 1
        << " cannot be delivered in t_cm=" << t_cm << " s";
    throw InfeasibleError(msg.str());
  }
  return e;
}

}  // namespace

SingleUserOutcome single_user_protocol(const GroundTruth& truth, const SingleUserConfig& cfg, double sigma,
                                       const FrameTiming& timing, const LinkPair& links, bool record_trace) {
  check_slots(cfg.slots1);
  check_slots(cfg.slots2);
  if (!(sigma > 0.0 && sigma <= kTwoPi)) throw ConfigError("sigma must lie in (0, 2 pi]");
  SingleUserOutcome out;
  out.slots = {cfg.slots1, cfg.slots2};
  const std::array<double, 2> theta{truth.theta1, truth.theta2};
  for (int i = 0; i < 2; ++i) {
    auto [u, trace] = single_user_alignment(i, out.slots[i], sigma, theta[i], record_trace);
    out.energy_j[i] = single_user_frame_energy(i, out.slots[i], u, timing, links);
    out.trace[i] = std::move(trace);
  }
  out.power_w = (out.energy_j[0] + out.energy_j[1]) / (2.0 * timing.frame_s);
  return out;
}

double single_user_power(const SingleUserConfig& cfg, double sigma, const FrameTiming& timing, const LinkPair& links) {
  check_slots(cfg.slots1);
  check_slots(cfg.slots2);
  const double e1 = single_user_frame_energy(0, cfg.slots1, std::ldexp(sigma, -cfg.slots1), timing, links);
  const double e2 = single_user_frame_energy(1, cfg.slots2, std::ldexp(sigma, -cfg.slots2), timing, links);
  return (e1 + e2) / (2.0 * timing.frame_s);
}

double expected_power(Scheme scheme, int depth1, int depth2, double sigma, const FrameTiming& timing,
                      const LinkPair& links) {
  switch (scheme) {
    case Scheme::joint_bisection:
      check_slots(depth1);
      return closed_form_power(sigma, timing.with_slots(depth1), links);
    case Scheme::joint_exhaustive:
      return exhaustive_expected_power({depth1, sigma}, timing, links);
    case Scheme::single_user:
      return single_user_power({depth1, depth2}, sigma, timing, links);
  }
  throw ConfigError("unknown scheme");
}

DepthChoice optimize_depth(Scheme scheme, int cap, double sigma, const FrameTiming& timing, const LinkPair& links) {
  if (cap < 1) throw ConfigError("depth cap must be at least 1");
  DepthChoice best;
  best.power_w = std::numeric_limits<double>::infinity();
  bool found = false;
  auto consider = [&](int d1, int d2) {
    double p = 0.0;
    try {
      p = expected_power(scheme, d1, d2, sigma, timing, links);
    } catch (const InfeasibleError&) {
      return;
    }
    if (!std::isfinite(p)) return;
    if (!found || p < best.power_w * (1.0 - kDepthTieTolerance)) {
      best = {d1, d2, p};
      found = true;
    }
  };
  for (int d1 = 1; d1 <= cap; ++d1) {
    if (scheme == Scheme::single_user) {
      for (int d2 = 1; d2 <= cap; ++d2) consider(d1, d2);
    } else {
      consider(d1, d1);
    }
  }
  if (!found) {
    std::ostringstream msg;
    msg << scheme_name(scheme) << ": no depth in 1.." << cap << " is feasible for R1=" << links[0].rate()
        << ", R2=" << links[1].rate() << " bps/Hz";
    throw InfeasibleError(msg.str());
  }
  return best;
}

}  // namespace beamlab
