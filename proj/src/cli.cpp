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

#include "beamlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "beamlab/dp_planner.hpp"
#include "beamlab/errors.hpp"

namespace beamlab {

namespace {

enum class Kind { plain, time, length, frequency, angle, psd };

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view key, const std::string& what) {
  throw ConfigError(std::string(key) + ": " + what);
}

double parse_number(std::string_view key, std::string_view text, std::string_view* rest) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc()) fail(key, "expected a number, got '" + std::string(text) + "'");
  *rest = trim(std::string_view(res.ptr, static_cast<std::size_t>(end - res.ptr)));
  return value;
}

double parse_quantity(std::string_view key, std::string_view text, Kind kind) {
  text = trim(text);
  if (kind == Kind::angle && text == "pi") return kPi;
  std::string_view unit;
  const double x = parse_number(key, text, &unit);
  double scale = 1.0;
  bool ok = unit.empty();
  switch (kind) {
    case Kind::plain:
      break;
    case Kind::time:
      if (unit == "s") scale = 1.0, ok = true;
      if (unit == "ms") scale = 1e-3, ok = true;
      if (unit == "us") scale = 1e-6, ok = true;
      if (unit == "ns") scale = 1e-9, ok = true;
      break;
    case Kind::length:
      if (unit == "m") scale = 1.0, ok = true;
      if (unit == "mm") scale = 1e-3, ok = true;
      if (unit == "cm") scale = 1e-2, ok = true;
      if (unit == "km") scale = 1e3, ok = true;
      break;
    case Kind::frequency:
      if (unit == "Hz") scale = 1.0, ok = true;
      if (unit == "kHz") scale = 1e3, ok = true;
      if (unit == "MHz") scale = 1e6, ok = true;
      if (unit == "GHz") scale = 1e9, ok = true;
      break;
    case Kind::angle:
      if (unit == "rad") scale = 1.0, ok = true;
      if (unit == "pi") scale = kPi, ok = true;
      break;
    case Kind::psd:
      if (unit == "W/Hz") ok = true;
      if (unit == "dBm/Hz") return std::pow(10.0, (x - 30.0) / 10.0);
      break;
  }
  if (!ok) fail(key, "unknown unit '" + std::string(unit) + "'");
  return x * scale;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec == std::errc() && res.ptr == text.data() + text.size()) return value;
  // Accept integral floating forms such as 1e5.
  std::string_view rest;
  const double x = parse_number(key, text, &rest);
  if (!rest.empty() || x != std::floor(x) || x < 0.0 || x > 9.0e15) {
    fail(key, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return static_cast<Int>(x);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    parts.push_back(trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

std::vector<double> ExperimentConfig::default_rate_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.5 * i);
  return grid;
}

FrameTiming ExperimentConfig::timing() const {
  FrameTiming t;
  t.frame_s = frame_s;
  t.slot_s = slot_s;
  t.beacon_s = beacon_s;
  t.slots = slots;
  return t;
}

namespace {

LinkParams user_params(const ExperimentConfig& c, double distance, double rate) {
  LinkParams p;
  p.wavelength_m = c.wavelength_m;
  p.distance_m = distance;
  p.path_loss_exponent = c.path_loss_exponent;
  p.noise_psd_w_per_hz = c.noise_psd_w_per_hz;
  p.bandwidth_hz = c.bandwidth_hz;
  p.rate_bps_per_hz = rate;
  return p;
}

}  // namespace

LinkPair ExperimentConfig::links(double rate_total) const {
  const auto [r1, r2] = split_rate(rate_total, psi);
  return make_link_pair(user_params(*this, distance1_m, r1), user_params(*this, distance2_m, r2), frame_s);
}

SweepConfig ExperimentConfig::sweep_config() const {
  SweepConfig s;
  s.schemes = schemes;
  s.r_tot = r_tot;
  s.psi = psi;
  s.sigma = sigma;
  s.timing = timing();
  s.user1 = user_params(*this, distance1_m, 0.0);
  s.user2 = user_params(*this, distance2_m, 0.0);
  s.depth_cap = depth_cap;
  s.trials = trials;
  s.master_seed = master_seed;
  s.threads = threads;
  return s;
}

void ExperimentConfig::validate() const {
  timing().validate();
  if (!(sigma > 0.0 && sigma <= kTwoPi * (1.0 + 1e-15))) fail("sigma", "must lie in (0, 2 pi]");
  user_params(*this, distance1_m, 0.0).validate();
  user_params(*this, distance2_m, 0.0).validate();
  if (depth_cap < 1 || depth_cap > 20) fail("depth_cap", "must lie in [1, 20]");
  if (!(depth_cap * slot_s < frame_s)) fail("depth_cap", "alignment at the cap leaves no time for data");
  if (schemes.empty()) fail("schemes", "at least one scheme is required");
  if (r_tot.empty()) fail("r_tot", "grid is empty");
  for (double r : r_tot) {
    if (!(r > 0.0) || !std::isfinite(r)) fail("r_tot", "sum rates must be positive");
  }
  if (!(psi > 0.0 && psi <= 1.0)) fail("psi", "must lie in (0, 1]");
  if (!(eval_r_tot > 0.0) || !std::isfinite(eval_r_tot)) fail("eval_r_tot", "must be positive");
  if (trials < 1) fail("trials", "must be at least 1");
  if (threads < 0) fail("threads", "must be non-negative (0 = auto)");
  if (dp_resolution < kMinDpResolution || dp_resolution > 4096) {
    fail("dp_resolution", "must lie in [" + std::to_string(kMinDpResolution) + ", 4096]");
  }
  if (output.empty()) fail("output", "path is empty");
}

std::vector<double> parse_rate_grid(std::string_view text) {
  text = trim(text);
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) fail("r_tot", "range form is start:step:stop");
    const double start = parse_quantity("r_tot", parts[0], Kind::plain);
    const double step = parse_quantity("r_tot", parts[1], Kind::plain);
    const double stop = parse_quantity("r_tot", parts[2], Kind::plain);
    if (!(step > 0.0) || !(stop >= start)) fail("r_tot", "range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) fail("r_tot", "range has too many points");
    for (long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
  }
  for (auto part : split(text, ',')) grid.push_back(parse_quantity("r_tot", part, Kind::plain));
  return grid;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "frame") {
    cfg.frame_s = parse_quantity(key, value, Kind::time);
  } else if (key == "slot") {
    cfg.slot_s = parse_quantity(key, value, Kind::time);
  } else if (key == "beacon") {
    cfg.beacon_s = parse_quantity(key, value, Kind::time);
  } else if (key == "slots") {
    cfg.slots = parse_integer<int>(key, value);
  } else if (key == "sigma") {
    cfg.sigma = parse_quantity(key, value, Kind::angle);
  } else if (key == "wavelength") {
    cfg.wavelength_m = parse_quantity(key, value, Kind::length);
  } else if (key == "distance") {
    cfg.distance1_m = cfg.distance2_m = parse_quantity(key, value, Kind::length);
  } else if (key == "distance1") {
    cfg.distance1_m = parse_quantity(key, value, Kind::length);
  } else if (key == "distance2") {
    cfg.distance2_m = parse_quantity(key, value, Kind::length);
  } else if (key == "path_loss_exponent") {
    cfg.path_loss_exponent = parse_quantity(key, value, Kind::plain);
  } else if (key == "noise_psd") {
    cfg.noise_psd_w_per_hz = parse_quantity(key, value, Kind::psd);
  } else if (key == "bandwidth") {
    cfg.bandwidth_hz = parse_quantity(key, value, Kind::frequency);
  } else if (key == "depth_cap") {
    cfg.depth_cap = parse_integer<int>(key, value);
  } else if (key == "schemes") {
    cfg.schemes.clear();
    try {
      for (auto name : split(value, ',')) cfg.schemes.push_back(parse_scheme(name));
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  } else if (key == "r_tot") {
    try {
      cfg.r_tot = parse_rate_grid(value);
    } catch (const ConfigError& e) {
      fail(key, e.what());
    }
  } else if (key == "psi") {
    cfg.psi = parse_quantity(key, value, Kind::plain);
  } else if (key == "eval_r_tot") {
    cfg.eval_r_tot = parse_quantity(key, value, Kind::plain);
  } else if (key == "trials") {
    cfg.trials = parse_integer<std::size_t>(key, value);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "output") {
    cfg.output = std::string(value);
  } else if (key == "threads") {
    cfg.threads = parse_integer<int>(key, value);
  } else if (key == "dp_resolution") {
    cfg.dp_resolution = parse_integer<int>(key, value);
  } else {
    fail(key, "unknown setting");
  }
}

ExperimentConfig parse_config(std::istream& in, std::string_view source, ExperimentConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(base, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in, path, std::move(base));
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto join = [](const auto& items, auto&& to_text) {
    std::string s;
    for (const auto& x : items) {
      if (!s.empty()) s += ',';
      s += to_text(x);
    }
    return s;
  };
  os << "# beamlab experiment (SI units)\n";
  os << "frame = " << fmt(c.frame_s) << '\n';
  os << "slot = " << fmt(c.slot_s) << '\n';
  os << "beacon = " << fmt(c.beacon_s) << '\n';
  os << "slots = " << c.slots << '\n';
  os << "sigma = " << fmt(c.sigma) << '\n';
  os << "wavelength = " << fmt(c.wavelength_m) << '\n';
  os << "distance1 = " << fmt(c.distance1_m) << '\n';
  os << "distance2 = " << fmt(c.distance2_m) << '\n';
  os << "path_loss_exponent = " << fmt(c.path_loss_exponent) << '\n';
  os << "noise_psd = " << fmt(c.noise_psd_w_per_hz) << '\n';
  os << "bandwidth = " << fmt(c.bandwidth_hz) << '\n';
  os << "depth_cap = " << c.depth_cap << '\n';
  os << "schemes = " << join(c.schemes, [](Scheme s) { return std::string(scheme_name(s)); }) << '\n';
  os << "r_tot = " << join(c.r_tot, fmt) << '\n';
  os << "psi = " << fmt(c.psi) << '\n';
  os << "eval_r_tot = " << fmt(c.eval_r_tot) << '\n';
  os << "trials = " << c.trials << '\n';
  os << "master_seed = " << c.master_seed << '\n';
  os << "output = " << c.output << '\n';
  os << "threads = " << c.threads << '\n';
  os << "dp_resolution = " << c.dp_resolution << '\n';
  return os.str();
}

// ------------------------------------------------------------------------
// sweep

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const auto rows = sweep(cfg.sweep_config());
    std::ofstream file(cfg.output, std::ios::binary);
    if (!file) {
      err << "error: cannot write output file '" << cfg.output << "'\n";
      return kExitConfig;
    }
    write_sweep_csv(rows, file);
    file.close();
    if (!file) {
      err << "error: failed while writing '" << cfg.output << "'\n";
      return kExitConfig;
    }

    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-17s %7s %6s %6s %14s %12s %8s\n", "scheme", "r_tot", "depth1", "depth2",
                  "power_w", "power_dbm", "n");
    out << buf;
    bool infeasible = false;
    for (const auto& r : rows) {
      const std::string name(scheme_name(r.scheme));
      if (!r.feasible) {
        infeasible = true;
        std::snprintf(buf, sizeof(buf), "%-17s %7.4g infeasible\n", name.c_str(), r.r_tot);
        out << buf;
        err << "infeasible: " << name << " at r_tot=" << r.r_tot << ": " << r.note << '\n';
        continue;
      }
      std::snprintf(buf, sizeof(buf), "%-17s %7.4g %6d %6d %14.6e %12.4f %8zu\n", name.c_str(), r.r_tot, r.depth1,
                    r.depth2, r.mean_power_w, r.mean_power_dbm, r.n_trials);
      out << buf;
    }
    out << "wrote " << rows.size() << " rows to " << cfg.output << '\n';
    return infeasible ? kExitInfeasible : kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

// ------------------------------------------------------------------------
// verify

namespace {

struct CheckLine {
  std::ostream& out;
  bool all_passed = true;

  void report(bool passed, std::string_view name, const std::string& detail) {
    all_passed = all_passed && passed;
    out << (passed ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    out.flush();
  }
};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

void check_dp_bisection(const ExperimentConfig& cfg, const LinkPair& links, CheckLine& lines) {
  const int cap = std::min(cfg.depth_cap, kMaxDpSlots);
  std::size_t states = 0;
  std::size_t value_checks = 0;
  std::size_t violations = 0;
  double gap = 0.0;
  double offset = 0.0;
  double policy_gap = -std::numeric_limits<double>::infinity();
  for (int l = 1; l <= cap; ++l) {
    const auto table =
        backward_induction(l, cfg.sigma, cfg.timing().with_slots(l), links, {cfg.dp_resolution, true, cfg.threads});
    const auto rep = verify_bisection_optimality(table, links, 1e-9, cfg.threads);
    states += rep.states_checked;
    value_checks += rep.value_checks;
    violations += rep.violations.size();
    gap = std::max(gap, rep.max_relative_gap);
    offset = std::max(offset, rep.max_argmin_offset);
    policy_gap = std::max(policy_gap, rep.max_policy_gap);
  }
  std::ostringstream d;
  d << "L=1.." << cap << " states=" << states << " value_checks=" << value_checks << " violations=" << violations
    << " max_rel_gap=" << fmt_short(gap) << " max_policy_gap=" << fmt_short(policy_gap)
    << " max_argmin_offset=" << offset << " steps";
  lines.report(violations == 0 && states > 0, "dp-bisection", d.str());
}

void check_dp_identity(const ExperimentConfig& cfg, const LinkPair& links, CheckLine& lines) {
  const int l = std::min({5, cfg.depth_cap, kMaxDpSlots});
  const FrameTiming t = cfg.timing().with_slots(l);
  const auto table = backward_induction(l, cfg.sigma, t, links, {cfg.dp_resolution, false, cfg.threads});
  const auto rep = bisection_identity_report(table, links);
  std::ostringstream d;
  d << "L=" << l << " states=" << rep.states_checked << " max_rel_err=" << fmt_short(rep.max_relative_error);
  lines.report(rep.states_checked > 0 && rep.max_relative_error <= 1e-6, "dp-identity", d.str());

  const double v0 = table.co_value(0, table.resolution()) / t.frame_s;
  const double cf = closed_form_power(cfg.sigma, t, links);
  const double rel = std::abs(v0 - cf) / cf;
  std::ostringstream d2;
  d2 << "L=" << l << " V0/t_fr=" << fmt_short(v0) << " W closed_form=" << fmt_short(cf) << " W rel_err=" << fmt_short(rel);
  lines.report(rel <= 1e-6, "dp-closed-form", d2.str());
}

void check_curvature(const LinkPair& links, const FrameTiming& timing, bool fault, CheckLine& lines) {
  auto second = [fault](const EnergyModel& e, double tau) { return fault ? -e.deriv2(tau) : e.deriv2(tau); };

  // Signs of eps' and eps'' on a log grid of transmit times.
  std::size_t sign_points = 0;
  std::size_t sign_failures = 0;
  for (const auto& e : links) {
    if (!(e.rate() > 0.0)) continue;
    for (double tau : log_grid(std::max(1e-6, e.frame_s() * e.rate() / 60.0), timing.frame_s, 200)) {
      ++sign_points;
      if (!(e.deriv1(tau) < 0.0 && second(e, tau) > 0.0)) ++sign_failures;
    }
  }
  lines.report(sign_points > 0 && sign_failures == 0, "energy-signs",
               "points=" + std::to_string(sign_points) + " failures=" + std::to_string(sign_failures));

  // Analytic derivatives against central differences.
  double fd_err = 0.0;
  std::size_t fd_points = 0;
  for (const auto& e : links) {
    if (!(e.rate() > 0.0)) continue;
    for (double tau : log_grid(std::max(1e-6, e.frame_s() * e.rate() / 60.0), timing.frame_s, 50)) {
      const double h = 1e-6 * tau;
      const double d1 = (e.energy(tau + h) - e.energy(tau - h)) / (2 * h);
      const double d2 = (e.deriv1(tau + h) - e.deriv1(tau - h)) / (2 * h);
      fd_err = std::max(fd_err, std::abs(d1 - e.deriv1(tau)) / std::abs(d1));
      fd_err = std::max(fd_err, std::abs(d2 - second(e, tau)) / std::abs(d2));
      ++fd_points;
    }
  }
  lines.report(fd_points > 0 && fd_err <= 1e-5, "finite-difference",
               "points=" + std::to_string(fd_points) + " max_rel_err=" + fmt_short(fd_err));

  // q(y1, y2) on the log grid, and the curvature expression at the TDM optimum.
  const double ratio = links[1].rate() > 0.0 ? links[0].rate() / links[1].rate() : 1.0;
  const auto ys = log_grid(0.01, 30.0, 200);
  double q_min = std::numeric_limits<double>::infinity();
  std::size_t q_fail = 0;
  for (double y1 : ys) {
    for (double y2 : ys) {
      const double q = convexity_margin(y1, y2, ratio);
      q_min = std::min(q_min, q);
      if (!(q > 0.0)) ++q_fail;
    }
  }
  std::size_t expr_points = 0;
  std::size_t expr_fail = 0;
  const double t_cm = timing.comm_time();
  for (double r : log_grid(1.0 / 64, 64.0, 61)) {
    const double tau = solve_tau(r, 1.0, t_cm, links);
    const auto& e1 = links[0];
    const auto& e2 = links[1];
    const double v = convexity_expression(e1.energy(tau), e1.deriv1(tau), second(e1, tau), e2.deriv1(t_cm - tau),
                                          second(e2, t_cm - tau));
    ++expr_points;
    if (!(v > 0.0)) ++expr_fail;
  }
  std::ostringstream d;
  d << "q_grid=200x200 q_failures=" << q_fail << " min_q=" << fmt_short(q_min) << " matched_points=" << expr_points
    << " matched_failures=" << expr_fail;
  lines.report(q_fail == 0 && expr_fail == 0, "convexity", d.str());
}

void check_monte_carlo(const ExperimentConfig& cfg, const LinkPair& links, CheckLine& lines) {
  TrialParams tp;
  tp.sigma = cfg.sigma;
  tp.timing = cfg.timing();
  tp.links = links;
  const auto st = run_trials(Scheme::joint_bisection, tp, cfg.trials, cfg.master_seed, {cfg.threads, false});
  const double cf = closed_form_power(cfg.sigma, tp.timing, links);
  const double band = std::max(3.0 * st.stderr_w, 1e-12 * cf);
  const double db = std::abs(watts_to_dbm(st.mean_power_w) - watts_to_dbm(cf));
  std::ostringstream d;
  d << "L=" << cfg.slots << " n=" << st.n << " mean=" << fmt_short(st.mean_power_w) << " W closed_form=" << fmt_short(cf)
    << " W stderr=" << fmt_short(st.stderr_w) << " |delta_db|=" << fmt_short(db);
  lines.report(std::abs(st.mean_power_w - cf) <= band && db <= 0.01, "mc-closed-form", d.str());
}

void check_exhaustive(const ExperimentConfig& cfg, const LinkPair& links, CheckLine& lines) {
  const ExhaustiveConfig ex{cfg.slots, cfg.sigma};
  const FrameTiming timing = cfg.timing();
  const int k = ex.beams();
  const double w = ex.beam_width();
  // Direct enumeration of every (id1, id2) pair.
  double sum = 0.0;
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= k; ++j) {
      sum += terminal_cost(w, w, timing.frame_s - std::max(i, j) * timing.slot_s, links) / timing.frame_s;
    }
  }
  const double enumerated = sum / (static_cast<double>(k) * k);
  TrialParams tp;
  tp.sigma = cfg.sigma;
  tp.timing = timing;
  tp.links = links;
  tp.depth1 = cfg.slots;
  const auto st = run_trials(Scheme::joint_exhaustive, tp, cfg.trials, cfg.master_seed, {cfg.threads, false});
  const double analytic = exhaustive_expected_power(ex, timing, links);
  const bool ok = std::abs(st.mean_power_w - enumerated) <= 3.0 * st.stderr_w &&
                  std::abs(analytic - enumerated) <= 1e-10 * enumerated;
  std::ostringstream d;
  d << "K=" << k << " pairs=" << static_cast<long>(k) * k << " n=" << st.n << " mean=" << fmt_short(st.mean_power_w)
    << " W enumerated=" << fmt_short(enumerated) << " W stderr=" << fmt_short(st.stderr_w)
    << " z=" << fmt_short(st.stderr_w > 0 ? (st.mean_power_w - enumerated) / st.stderr_w : 0.0);
  lines.report(ok, "exhaustive-enumeration", d.str());
}

}  // namespace

int cmd_verify(const ExperimentConfig& cfg, const VerifyOptions& options, std::ostream& out) {
  try {
    cfg.validate();
    const LinkPair links = cfg.links(cfg.eval_r_tot);
    CheckLine lines{out};
    out << "verify: r_tot=" << cfg.eval_r_tot << " psi=" << cfg.psi << " sigma=" << fmt_short(cfg.sigma)
        << " L=" << cfg.slots << " depth_cap=" << cfg.depth_cap << " grid=" << cfg.dp_resolution + 1 << " points\n";
    if (!options.skip_dp) {
      check_dp_bisection(cfg, links, lines);
      check_dp_identity(cfg, links, lines);
    }
    check_curvature(links, cfg.timing(), options.inject_curvature_fault, lines);
    check_monte_carlo(cfg, links, lines);
    check_exhaustive(cfg, links, lines);
    out << (lines.all_passed ? "all checks passed" : "verification FAILED") << '\n';
    return lines.all_passed ? kExitOk : kExitVerification;
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    out << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

// ------------------------------------------------------------------------
// trace

namespace {

void print_slot(std::ostream& out, const SlotRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%4d  %-44s  %d %d  %.9f  %.9f  %d\n", r.slot + 1, r.beam.to_string().c_str(),
                r.fb.ack1 ? 1 : 0, r.fb.ack2 ? 1 : 0, r.after.u1, r.after.u2, r.after.co_located ? 1 : 0);
  out << buf;
}

void print_schedule(std::ostream& out, const Schedule& s, double frame_s) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "schedule: t_cm=%.9g s tau1=%.9g s tau2=%.9g s p1=%.6e W p2=%.6e W energy=%.6e J power=%.6e W "
                "(%.4f dBm)\n",
                s.comm_time, s.tau1, s.tau2(), s.power1, s.power2, s.energy_total, s.energy_total / frame_s,
                watts_to_dbm(s.energy_total / frame_s));
  out << buf;
}

}  // namespace

int cmd_trace(const ExperimentConfig& cfg, Scheme scheme, std::uint64_t seed, std::ostream& out) {
  try {
    cfg.validate();
    const LinkPair links = cfg.links(cfg.eval_r_tot);
    const FrameTiming timing = cfg.timing();
    Rng rng(seed);
    const GroundTruth gt = draw_ground_truth(cfg.sigma, rng);
    char buf[256];
    std::snprintf(buf, sizeof(buf), "trace: scheme=%s seed=%llu L=%d r_tot=%g psi=%g theta1=%.9f theta2=%.9f\n",
                  std::string(scheme_name(scheme)).c_str(), static_cast<unsigned long long>(seed), cfg.slots,
                  cfg.eval_r_tot, cfg.psi, gt.theta1, gt.theta2);
    out << buf;
    const char* header = "slot  beam                                          c1 c2  u1           u2           rho\n";
    switch (scheme) {
      case Scheme::joint_bisection: {
        const FrameOutcome f = joint_bisection_frame(gt, cfg.sigma, timing, links, true);
        out << header;
        for (const auto& r : f.trace) print_slot(out, r);
        if (!f.feasible) throw InfeasibleError("no feasible schedule after alignment");
        print_schedule(out, f.schedule, timing.frame_s);
        break;
      }
      case Scheme::joint_exhaustive: {
        const ExhaustiveConfig ex{cfg.slots, cfg.sigma};
        const FrameOutcome f = exhaustive_protocol(gt, ex, timing, links);
        out << "slot  beam                                          c1 c2\n";
        for (int j = 1; j <= f.slots_used; ++j) {
          const ArcSet beam = exhaustive_beam(ex, j);
          const Feedback fb = feedback(gt, beam);
          std::snprintf(buf, sizeof(buf), "%4d  %-44s  %d %d\n", j, beam.to_string().c_str(), fb.ack1 ? 1 : 0,
                        fb.ack2 ? 1 : 0);
          out << buf;
        }
        out << "cells: id1=" << exhaustive_cell(ex, gt.theta1) << " id2=" << exhaustive_cell(ex, gt.theta2)
            << " slots_used=" << f.slots_used << '\n';
        if (!f.feasible) throw InfeasibleError("exhaustive scan leaves no feasible schedule");
        print_schedule(out, f.schedule, timing.frame_s);
        break;
      }
      case Scheme::single_user: {
        const SingleUserOutcome s = single_user_protocol(gt, {cfg.slots, cfg.slots}, cfg.sigma, timing, links, true);
        for (int i = 0; i < 2; ++i) {
          out << "frame " << i + 1 << " (user " << i + 1 << " alone, rate " << 2.0 * links[i].rate() << ")\n"
              << header;
          for (const auto& r : s.trace[i]) print_slot(out, r);
          std::snprintf(buf, sizeof(buf), "energy: user %d %.6e J over t_cm=%.9g s\n", i + 1, s.energy_j[i],
                        timing.frame_s - s.slots[i] * timing.slot_s);
          out << buf;
        }
        std::snprintf(buf, sizeof(buf), "power: %.6e W (%.4f dBm) averaged over both frames\n", s.power_w,
                      watts_to_dbm(s.power_w));
        out << buf;
        break;
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    out << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  }
}

}  // namespace beamlab
