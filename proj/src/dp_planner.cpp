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

#include "beamlab/dp_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>

#include "beamlab/errors.hpp"
#include "beamlab/parallel.hpp"
#include "beamlab/tdm_scheduler.hpp"

namespace beamlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct State {
  int m1;
  int m2;  // equal to m1 for co-located states
  bool co;
};

// Lattice states reachable at slot k from (N, N, co-located).
std::vector<State> states_at(int k, int n, bool reachable_only) {
  std::vector<State> out;
  if (reachable_only && k == 0) {
    out.push_back({n, n, true});
    return out;
  }
  for (int m = 1; m <= n; ++m) out.push_back({m, m, true});
  if (reachable_only && k == 1) {
    for (int a = 1; a < n; ++a) out.push_back({a, n - a, false});
    return out;
  }
  for (int a = 1; a < n; ++a) {
    for (int b = 1; a + b <= n; ++b) out.push_back({a, b, false});
  }
  return out;
}

// Ordering key for tie-breaks: Chebyshev distance to (m1/2, m2/2) in half
// steps first, then the L1 distance.
long lattice_distance(int j1, int m1, int j2, int m2) {
  const long d1 = std::abs(2 * j1 - m1);
  const long d2 = std::abs(2 * j2 - m2);
  return (std::max(d1, d2) << 20) + d1 + d2;
}

// Picks, among candidates within the tie tolerance of the minimum, the one
// closest to bisection. `distance` is measured in half lattice steps.
struct Selector {
  double best = std::numeric_limits<double>::infinity();

  template <class Values, class Distance>
  std::size_t pick(const Values& values, Distance&& distance) {
    best = *std::min_element(values.begin(), values.end());
    const double slack = kDpTieTolerance * std::abs(best);
    std::size_t chosen = 0;
    long chosen_distance = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] <= best + slack) {
        const long d = distance(i);
        if (d < chosen_distance) {
          chosen_distance = d;
          chosen = i;
        }
      }
    }
    return chosen;
  }
};

}  // namespace

ValueTable::ValueTable(int slots, int resolution, double sigma, double comm_time)
    : slots_(slots), resolution_(resolution), sigma_(sigma), comm_time_(comm_time) {
  const std::size_t n1 = static_cast<std::size_t>(resolution) + 1;
  co_.assign(slots + 1, std::vector<double>(n1, kNaN));
  sep_.assign(slots + 1, std::vector<double>(n1 * n1, kNaN));
  co_arg_.assign(slots + 1, std::vector<std::int16_t>(n1, -1));
  sep_arg1_.assign(slots + 1, std::vector<std::int16_t>(n1 * n1, -1));
  sep_arg2_.assign(slots + 1, std::vector<std::int16_t>(n1 * n1, -1));
  // Zero-width successors only ever appear with probability exactly zero.
  for (int k = 0; k <= slots; ++k) {
    co_[k][0] = 0.0;
    for (int m = 0; m <= resolution; ++m) {
      sep_[k][index(0, m)] = 0.0;
      sep_[k][index(m, 0)] = 0.0;
    }
  }
}

bool ValueTable::co_evaluated(int k, int m) const { return m > 0 && !std::isnan(co_[k][m]); }

bool ValueTable::sep_evaluated(int k, int m1, int m2) const {
  return m1 > 0 && m2 > 0 && m1 + m2 <= resolution_ && !std::isnan(sep_[k][index(m1, m2)]);
}

double ValueTable::co_objective(int k, int m, int j) const {
  const double p = static_cast<double>(j) / m;
  const double q = static_cast<double>(m - j) / m;
  const auto& co = co_[k + 1];
  const auto& sep = sep_[k + 1];
  return (p * p * co[j] + q * q * co[m - j]) + p * q * (sep[index(j, m - j)] + sep[index(m - j, j)]);
}

double ValueTable::sep_objective(int k, int m1, int m2, int j1, int j2) const {
  const double p1 = static_cast<double>(j1) / m1;
  const double q1 = static_cast<double>(m1 - j1) / m1;
  const double p2 = static_cast<double>(j2) / m2;
  const double q2 = static_cast<double>(m2 - j2) / m2;
  const auto& v = sep_[k + 1];
  return p1 * (p2 * v[index(j1, j2)] + q2 * v[index(j1, m2 - j2)]) +
         q1 * (p2 * v[index(m1 - j1, j2)] + q2 * v[index(m1 - j1, m2 - j2)]);
}

ValueTable backward_induction(int slots, double sigma, const FrameTiming& timing, const LinkPair& links,
                              const DpGrid& grid) {
  if (slots < 0 || slots > kMaxDpSlots) {
    throw ConfigError("dp: slots must lie in [0, " + std::to_string(kMaxDpSlots) + "]");
  }
  if (grid.resolution < kMinDpResolution) {
    throw ConfigError("dp: beam-width grid needs at least " + std::to_string(kMinDpResolution + 1) +
                      " points per axis");
  }
  if (grid.resolution > std::numeric_limits<std::int16_t>::max()) {
    throw ConfigError("dp: beam-width grid too fine");
  }
  if (!(sigma > 0.0 && sigma <= kTwoPi)) throw ConfigError("dp: sigma must lie in (0, 2 pi]");
  const FrameTiming t = timing.with_slots(slots);
  t.validate();

  const int n = grid.resolution;
  const int threads = resolve_threads(grid.threads);
  ValueTable table(slots, n, sigma, t.comm_time());

  // Terminal values.
  {
    const auto states = states_at(slots, n, grid.reachable_only);
    std::vector<double> values(states.size());
    parallel_for(states.size(), threads, [&](std::size_t i) {
      const State& s = states[i];
      values[i] = terminal_cost(table.width(s.m1), table.width(s.m2), t.comm_time(), links);
    });
    for (std::size_t i = 0; i < states.size(); ++i) {
      const State& s = states[i];
      if (s.co) {
        table.co_[slots][s.m1] = values[i];
      } else {
        table.sep_[slots][table.index(s.m1, s.m2)] = values[i];
      }
    }
  }

  for (int k = slots - 1; k >= 0; --k) {
    const auto states = states_at(k, n, grid.reachable_only);
    std::vector<double> values(states.size());
    std::vector<std::pair<int, int>> args(states.size());
    parallel_for(states.size(), threads, [&](std::size_t i) {
      const State& s = states[i];
      thread_local std::vector<double> scratch;
      Selector selector;
      if (s.co) {
        // The objective is symmetric under j -> m - j; scan the lower half.
        const int m = s.m1;
        scratch.resize(static_cast<std::size_t>(m / 2 + 1));
        for (int j = 0; j <= m / 2; ++j) scratch[j] = table.co_objective(k, m, j);
        const std::size_t pick = selector.pick(scratch, [m](std::size_t j) {
          return static_cast<long>(std::abs(2 * static_cast<int>(j) - m));
        });
        values[i] = selector.best;
        args[i] = {static_cast<int>(pick), static_cast<int>(pick)};
        return;
      }
      const int m1 = s.m1;
      const int m2 = s.m2;
      const int h1 = m1 / 2;
      const int h2 = m2 / 2;
      const std::size_t cols = static_cast<std::size_t>(h2 + 1);
      scratch.resize(static_cast<std::size_t>(h1 + 1) * cols);
      const auto& v = table.sep_[k + 1];
      for (int j1 = 0; j1 <= h1; ++j1) {
        const double p1 = static_cast<double>(j1) / m1;
        const double q1 = static_cast<double>(m1 - j1) / m1;
        const double* a = &v[table.index(j1, 0)];
        const double* b = &v[table.index(m1 - j1, 0)];
        double* out = &scratch[static_cast<std::size_t>(j1) * cols];
        for (int j2 = 0; j2 <= h2; ++j2) {
          const double p2 = static_cast<double>(j2) / m2;
          const double q2 = static_cast<double>(m2 - j2) / m2;
          out[j2] = p1 * (p2 * a[j2] + q2 * a[m2 - j2]) + q1 * (p2 * b[j2] + q2 * b[m2 - j2]);
        }
      }
      const std::size_t pick = selector.pick(scratch, [&](std::size_t idx) {
        const int j1 = static_cast<int>(idx / cols);
        const int j2 = static_cast<int>(idx % cols);
        return lattice_distance(j1, m1, j2, m2);
      });
      values[i] = selector.best;
      args[i] = {static_cast<int>(pick / cols), static_cast<int>(pick % cols)};
    });
    for (std::size_t i = 0; i < states.size(); ++i) {
      const State& s = states[i];
      if (s.co) {
        table.co_[k][s.m1] = values[i];
        table.co_arg_[k][s.m1] = static_cast<std::int16_t>(args[i].first);
      } else {
        const std::size_t idx = table.index(s.m1, s.m2);
        table.sep_[k][idx] = values[i];
        table.sep_arg1_[k][idx] = static_cast<std::int16_t>(args[i].first);
        table.sep_arg2_[k][idx] = static_cast<std::int16_t>(args[i].second);
      }
    }
  }
  return table;
}

BisectionReport verify_bisection_optimality(const ValueTable& table, const LinkPair& links,
                                            double relative_tolerance, int threads) {
  struct Item {
    int k;
    State s;
  };
  std::vector<Item> items;
  const int n = table.resolution();
  for (int k = 0; k < table.slots(); ++k) {
    for (int m = 1; m <= n; ++m) {
      if (table.co_evaluated(k, m)) items.push_back({k, {m, m, true}});
    }
    for (int a = 1; a < n; ++a) {
      for (int b = 1; a + b <= n; ++b) {
        if (table.sep_evaluated(k, a, b)) items.push_back({k, {a, b, false}});
      }
    }
  }

  struct Outcome {
    bool value_checked = false;
    double gap = 0.0;
    double policy_gap = 0.0;
    double offset = 0.0;
    std::vector<BisectionViolation> violations;
  };
  std::vector<Outcome> outcomes(items.size());

  // Full rescan, deliberately without the symmetry shortcut used when building.
  parallel_for(items.size(), resolve_threads(threads), [&](std::size_t i) {
    const auto [k, s] = items[i];
    thread_local std::vector<double> scratch;
    Outcome& out = outcomes[i];
    const int m1 = s.m1;
    const int m2 = s.m2;
    Selector selector;
    int arg1 = 0;
    int arg2 = 0;
    double stored = 0.0;
    bool half_on_lattice = false;
    double bisection = kNaN;
    if (s.co) {
      scratch.resize(static_cast<std::size_t>(m1 + 1));
      for (int j = 0; j <= m1; ++j) scratch[j] = table.co_objective(k, m1, j);
      const std::size_t pick = selector.pick(scratch, [m1](std::size_t j) {
        return static_cast<long>(std::abs(2 * static_cast<int>(j) - m1));
      });
      arg1 = arg2 = static_cast<int>(pick);
      stored = table.co_value(k, m1);
      half_on_lattice = m1 % 2 == 0;
      if (half_on_lattice) bisection = scratch[m1 / 2];
    } else {
      const std::size_t cols = static_cast<std::size_t>(m2 + 1);
      scratch.resize(static_cast<std::size_t>(m1 + 1) * cols);
      for (int j1 = 0; j1 <= m1; ++j1) {
        const double p1 = static_cast<double>(j1) / m1;
        const double q1 = static_cast<double>(m1 - j1) / m1;
        double* row = &scratch[static_cast<std::size_t>(j1) * cols];
        for (int j2 = 0; j2 <= m2; ++j2) {
          const double p2 = static_cast<double>(j2) / m2;
          const double q2 = static_cast<double>(m2 - j2) / m2;
          row[j2] = p1 * (p2 * table.sep_value(k + 1, j1, j2) + q2 * table.sep_value(k + 1, j1, m2 - j2)) +
                    q1 * (p2 * table.sep_value(k + 1, m1 - j1, j2) + q2 * table.sep_value(k + 1, m1 - j1, m2 - j2));
        }
      }
      const std::size_t pick = selector.pick(scratch, [&](std::size_t idx) {
        return lattice_distance(static_cast<int>(idx / cols), m1, static_cast<int>(idx % cols), m2);
      });
      arg1 = static_cast<int>(pick / cols);
      arg2 = static_cast<int>(pick % cols);
      stored = table.sep_value(k, m1, m2);
      half_on_lattice = m1 % 2 == 0 && m2 % 2 == 0;
      if (half_on_lattice) bisection = scratch[static_cast<std::size_t>(m1 / 2) * cols + m2 / 2];
    }
    const double best = selector.best;
    const double off1 = std::abs(arg1 - 0.5 * m1);
    const double off2 = std::abs(arg2 - 0.5 * m2);
    out.offset = std::max(off1, off2);

    auto violation = [&](std::string reason) {
      out.violations.push_back({k, m1, m2, s.co, arg1, arg2, best, bisection, std::move(reason)});
    };
    if (out.offset > 1.0) violation("minimizer farther than one lattice step from u/2");
    if (half_on_lattice) {
      out.value_checked = true;
      out.gap = (bisection - best) / best;
      if (out.gap > relative_tolerance) violation("bisection value exceeds the grid minimum");
    }
    const double shrink = std::ldexp(1.0, -(table.slots() - k));
    const double policy = terminal_cost(table.width(m1) * shrink, table.width(m2) * shrink, table.comm_time(), links);
    out.policy_gap = (policy - best) / best;
    if (out.policy_gap > relative_tolerance) violation("bisection policy value exceeds the grid minimum");
    if (!(std::abs(stored - best) <= 1e-12 * std::abs(best))) {
      violation("stored value disagrees with the rescanned minimum");
    }
  });

  BisectionReport report;
  for (auto& out : outcomes) {
    ++report.states_checked;
    if (out.value_checked) {
      ++report.value_checks;
      report.max_relative_gap = std::max(report.max_relative_gap, out.gap);
    }
    report.max_argmin_offset = std::max(report.max_argmin_offset, out.offset);
    report.max_policy_gap = std::max(report.max_policy_gap, out.policy_gap);
    for (auto& v : out.violations) report.violations.push_back(std::move(v));
  }
  return report;
}

IdentityReport bisection_identity_report(const ValueTable& table, const LinkPair& links) {
  IdentityReport report;
  const int n = table.resolution();
  const int slots = table.slots();
  for (int k = 0; k <= slots; ++k) {
    const int step = 1 << (slots - k);
    for (int m = step; m <= n; m += step) {
      const double u = table.width(m) / step;
      const double expected = terminal_cost(u, u, table.comm_time(), links);
      auto check = [&](double actual) {
        ++report.states_checked;
        report.max_relative_error = std::max(report.max_relative_error, std::abs(actual - expected) / expected);
      };
      if (table.co_evaluated(k, m)) check(table.co_value(k, m));
      if (2 * m <= n && table.sep_evaluated(k, m, m)) check(table.sep_value(k, m, m));
    }
  }
  return report;
}

double closed_form_power_equal_gain(double sigma, const FrameTiming& timing, double gamma, double rate_total) {
  const double t_cm = timing.comm_time();
  if (!(t_cm > 0.0)) throw InfeasibleError("no communication time left in the frame");
  const double y = timing.frame_s * rate_total / t_cm;
  if (y > kMaxRateExponent) throw InfeasibleError("sum rate too high for the communication time");
  return sigma / (gamma * std::ldexp(1.0, timing.slots)) * (t_cm / timing.frame_s) *
         std::expm1(y * std::numbers::ln2);
}

double closed_form_power(double sigma, const FrameTiming& timing, const LinkPair& links) {
  if (links[0].gamma() == links[1].gamma()) {
    return closed_form_power_equal_gain(sigma, timing, links[0].gamma(), links[0].rate() + links[1].rate());
  }
  const double t_cm = timing.comm_time();
  const double tau = solve_tau(1.0, 1.0, t_cm, links);
  const double power = sigma / (timing.frame_s * std::ldexp(1.0, timing.slots)) *
                       (links[0].energy(tau) + links[1].energy(t_cm - tau));
  if (!std::isfinite(power)) throw InfeasibleError("closed-form power overflow");
  return power;
}

void write_value_table_csv(const ValueTable& table, std::ostream& os) {
  os << "k,u1_frac,u2_frac,rho,value_J,argmin_w1_frac,argmin_w2_frac\n";
  const int n = table.resolution();
  char buf[256];
  auto row = [&](int k, int m1, int m2, int rho, double value, int a1, int a2) {
    if (k < table.slots()) {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g,%.17g,%.17g\n", k, double(m1) / n,
                    double(m2) / n, rho, value, double(a1) / n, double(a2) / n);
    } else {
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d,%.17g,,\n", k, double(m1) / n, double(m2) / n, rho,
                    value);
    }
    os << buf;
  };
  for (int k = 0; k <= table.slots(); ++k) {
    for (int m = 1; m <= n; ++m) {
      if (table.co_evaluated(k, m)) row(k, m, m, 1, table.co_value(k, m), table.co_argmin(k, m), table.co_argmin(k, m));
    }
    for (int a = 1; a < n; ++a) {
      for (int b = 1; a + b <= n; ++b) {
        if (!table.sep_evaluated(k, a, b)) continue;
        const auto [a1, a2] = table.sep_argmin(k, a, b);
        row(k, a, b, 0, table.sep_value(k, a, b), a1, a2);
      }
    }
  }
}

}  // namespace beamlab
