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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "beamlab/cli.hpp"
#include "beamlab/errors.hpp"

using namespace beamlab;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("beamlab_test_" + name)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

}  // namespace

TEST_CASE("defaults serialize and parse back") {
  const ExperimentConfig d;
  CHECK(parse_text(serialize_config(d)) == d);
  CHECK(d.r_tot.size() == 20);
  CHECK(d.r_tot.front() == 0.5);
  CHECK(d.r_tot.back() == 10.0);
}

TEST_CASE("modified configs round-trip exactly") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.frame_s = rng.uniform(1e-3, 5e-3);
    c.slot_s = rng.uniform(5e-6, 2e-5);
    c.beacon_s = c.slot_s * rng.uniform(0.1, 0.9);
    c.slots = 1 + i % 7;
    c.sigma = rng.uniform(0.5, kTwoPi);
    c.distance2_m = rng.uniform(10, 100);
    c.noise_psd_w_per_hz = rng.uniform(1e-21, 1e-20);
    c.psi = rng.uniform(0.01, 1.0);
    c.r_tot = {rng.uniform(0.1, 3), rng.uniform(3, 9)};
    c.schemes = {Scheme::single_user};
    c.trials = 1 + i;
    c.master_seed = 0xffffffffffffffffULL - static_cast<unsigned>(i);
    c.output = "out dir/run" + std::to_string(i) + ".csv";
    c.threads = i % 5;
    REQUIRE_NOTHROW(c.validate());
    CHECK(parse_text(serialize_config(c)) == c);
  }
}

TEST_CASE("unit suffixes") {
  const ExperimentConfig c = parse_text(
      "frame = 2 ms\n"
      "slot = 10us\n"
      "beacon = 5000 ns\n"
      "wavelength = 5 mm\n"
      "distance = 0.05 km\n"
      "bandwidth = 500 MHz\n"
      "noise_psd = -174 dBm/Hz\n"
      "sigma = 2 pi\n");
  CHECK(c.frame_s == doctest::Approx(2e-3).epsilon(1e-15));
  CHECK(c.slot_s == doctest::Approx(10e-6).epsilon(1e-15));
  CHECK(c.beacon_s == doctest::Approx(5e-6).epsilon(1e-15));
  CHECK(c.wavelength_m == doctest::Approx(5e-3).epsilon(1e-15));
  CHECK(c.distance1_m == doctest::Approx(50.0));
  CHECK(c.distance2_m == doctest::Approx(50.0));
  CHECK(c.bandwidth_hz == doctest::Approx(500e6));
  CHECK(c.noise_psd_w_per_hz == doctest::Approx(std::pow(10.0, -20.4)).epsilon(1e-14));
  CHECK(c.sigma == doctest::Approx(kTwoPi).epsilon(1e-15));
  CHECK(parse_text("sigma = pi").sigma == doctest::Approx(kPi));
  CHECK(parse_text("noise_psd = 4e-21 W/Hz").noise_psd_w_per_hz == 4e-21);
  CHECK(parse_text("trials = 1e5").trials == 100000);
}

TEST_CASE("comments, blank lines and schemes") {
  const ExperimentConfig c = parse_text(
      "# experiment\n"
      "\n"
      "schemes = joint-bisection, single-user  # two of three\n"
      "r_tot = 1:0.5:3\n"
      "psi = 1\n");
  CHECK(c.schemes == std::vector<Scheme>{Scheme::joint_bisection, Scheme::single_user});
  CHECK(c.r_tot == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  CHECK(c.psi == 1.0);
}

TEST_CASE("rate grids") {
  CHECK(parse_rate_grid("0.5, 2,4") == std::vector<double>{0.5, 2.0, 4.0});
  const auto g = parse_rate_grid("0.5:0.5:10");
  CHECK(g.size() == 20);
  CHECK(g.back() == 10.0);
  CHECK(g == ExperimentConfig::default_rate_grid());
  CHECK_THROWS_AS(parse_rate_grid("1:0:3"), ConfigError);
  CHECK_THROWS_AS(parse_rate_grid("a,b"), ConfigError);
}

TEST_CASE("errors name the field and the line") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_text(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return {};
  };
  CHECK(message("frame = 2 parsecs").find("frame") != std::string::npos);
  CHECK(message("frame = 2 parsecs").find("unknown unit") != std::string::npos);
  CHECK(message("\n\nbogus = 1").find("test.cfg:3") != std::string::npos);
  CHECK(message("bogus = 1").find("bogus") != std::string::npos);
  CHECK(message("slots").find("key = value") != std::string::npos);
  CHECK(message("schemes = joint-magic").find("schemes") != std::string::npos);
  CHECK(message("r_tot = 1:x:3").find("r_tot") != std::string::npos);
  CHECK(message("trials = -3").find("trials") != std::string::npos);
  CHECK_THROWS_AS(load_config_file(temp_path("does_not_exist.cfg")), ConfigError);
}

TEST_CASE("validation names the offending field") {
  auto message = [](ExperimentConfig c) -> std::string {
    try {
      c.validate();
    } catch (const ConfigError& e) {
      return e.what();
    }
    return {};
  };
  ExperimentConfig c;
  c.psi = 1.5;
  CHECK(message(c).find("psi") != std::string::npos);
  c = {};
  c.beacon_s = 20e-6;
  CHECK(message(c).find("beacon") != std::string::npos);
  c = {};
  c.depth_cap = 0;
  CHECK(message(c).find("depth_cap") != std::string::npos);
  c = {};
  c.trials = 0;
  CHECK(message(c).find("trials") != std::string::npos);
  c = {};
  c.dp_resolution = 64;
  CHECK(message(c).find("dp_resolution") != std::string::npos);
}

TEST_CASE("sweep writes one row per scheme and rate") {
  ExperimentConfig c;
  c.trials = 200;
  c.output = temp_path("sweep.csv");
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_sweep(c, out, err) == kExitOk);
  const auto rows = lines_of(read_file(c.output));
  REQUIRE(rows.size() == 61);
  CHECK(rows[0] == kSweepCsvHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(csv_fields(rows[i]).size() == 10);
  CHECK(out.str().find("wrote 60 rows") != std::string::npos);

  // Only the single-user rows react to the rate ratio.
  ExperimentConfig d = c;
  d.psi = 0.25;
  d.output = temp_path("sweep_psi.csv");
  CHECK(cmd_sweep(d, out, err) == kExitOk);
  const auto other = lines_of(read_file(d.output));
  REQUIRE(other.size() == rows.size());
  int single_changed = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto a = csv_fields(rows[i]);
    const auto b = csv_fields(other[i]);
    if (a[0] == "single-user") {
      single_changed += a[5] != b[5] ? 1 : 0;
    } else {
      CHECK(a[5] == b[5]);
    }
  }
  CHECK(single_changed == 20);
  std::filesystem::remove(c.output);
  std::filesystem::remove(d.output);
}

TEST_CASE("sweep exit codes") {
  ExperimentConfig c;
  c.trials = 100;
  c.r_tot = {1.0, 1e4};
  c.output = temp_path("sweep_infeasible.csv");
  std::ostringstream out;
  std::ostringstream err;
  CHECK(cmd_sweep(c, out, err) == kExitInfeasible);
  CHECK(lines_of(read_file(c.output)).size() == 7);
  std::filesystem::remove(c.output);

  c.r_tot = {1.0};
  c.output = temp_path("no_such_dir") + "/x/y.csv";
  CHECK(cmd_sweep(c, out, err) == kExitConfig);
  c = {};
  c.psi = -1;
  CHECK(cmd_sweep(c, out, err) == kExitConfig);
}

TEST_CASE("verify prints one line per check and reacts to the curvature fault") {
  ExperimentConfig c;
  c.trials = 2000;
  VerifyOptions opt;
  opt.skip_dp = true;
  std::ostringstream out;
  CHECK(cmd_verify(c, opt, out) == kExitOk);
  const auto lines = lines_of(out.str());
  int checks = 0;
  for (const auto& l : lines) {
    if (l.rfind("PASS ", 0) == 0) ++checks;
    CHECK(l.rfind("FAIL ", 0) != 0);
  }
  CHECK(checks >= 5);
  CHECK(lines.back() == "all checks passed");

  opt.inject_curvature_fault = true;
  std::ostringstream bad;
  CHECK(cmd_verify(c, opt, bad) == kExitVerification);
  const std::string text = bad.str();
  CHECK(text.find("FAIL energy-signs") != std::string::npos);
  CHECK(text.find("FAIL finite-difference") != std::string::npos);
  CHECK(text.find("FAIL convexity") != std::string::npos);
  CHECK(text.find("PASS mc-closed-form") != std::string::npos);
}

TEST_CASE("verify including the small DP checks") {
  ExperimentConfig c;
  c.trials = 500;
  c.depth_cap = 2;
  c.slots = 2;
  c.dp_resolution = 128;
  std::ostringstream out;
  CHECK(cmd_verify(c, {}, out) == kExitOk);
  CHECK(out.str().find("PASS dp-bisection") != std::string::npos);
  CHECK(out.str().find("PASS dp-identity") != std::string::npos);
  CHECK(out.str().find("PASS dp-closed-form") != std::string::npos);
}

TEST_CASE("two-slot trace follows the transition rule") {
  ExperimentConfig c;
  c.slots = 2;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::ostringstream out;
    REQUIRE(cmd_trace(c, Scheme::joint_bisection, seed, out) == kExitOk);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0].rfind("trace: scheme=joint-bisection", 0) == 0);
    CHECK(lines[4].rfind("schedule: ", 0) == 0);
    double u = c.sigma;
    bool rho = true;
    for (int k = 0; k < 2; ++k) {
      const std::string& row = lines[2 + k];
      // Trailing columns: c1 c2 u1 u2 rho.
      std::istringstream tail(row.substr(row.rfind(')') + 1));
      int c1 = 0;
      int c2 = 0;
      double u1 = 0;
      double u2 = 0;
      int r = 0;
      tail >> c1 >> c2 >> u1 >> u2 >> r;
      REQUIRE(tail);
      u /= 2;
      rho = rho && c1 == c2;
      CHECK(u1 == doctest::Approx(u).epsilon(1e-8));
      CHECK(u2 == doctest::Approx(u).epsilon(1e-8));
      CHECK(r == (rho ? 1 : 0));
    }
  }
}

TEST_CASE("traces of the baselines") {
  ExperimentConfig c;
  c.slots = 3;
  std::ostringstream ex;
  CHECK(cmd_trace(c, Scheme::joint_exhaustive, 5, ex) == kExitOk);
  CHECK(ex.str().find("cells: id1=") != std::string::npos);
  std::ostringstream su;
  CHECK(cmd_trace(c, Scheme::single_user, 5, su) == kExitOk);
  CHECK(su.str().find("frame 2 (user 2 alone") != std::string::npos);
  CHECK(su.str().find("power: ") != std::string::npos);
  c.eval_r_tot = 1e4;
  std::ostringstream bad;
  CHECK(cmd_trace(c, Scheme::joint_bisection, 5, bad) == kExitInfeasible);
}
