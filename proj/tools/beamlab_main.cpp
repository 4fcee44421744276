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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamlab/cli.hpp"
#include "beamlab/errors.hpp"

int main(int argc, char** argv) {
  using namespace beamlab;
  CLI::App app{"beamlab: two-user mmWave beam-alignment simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> settings;
  app.add_option("-c,--config", config_path, "key = value configuration file");
  app.add_option("-s,--set", settings, "override a setting, key=value (repeatable)");

  // Shorthands for common settings; applied after --set.
  std::string psi, trials, seed, out, threads, r_tot, slots;
  app.add_option("--psi", psi, "rate ratio R2/R1 in (0, 1]");
  app.add_option("--trials", trials, "Monte Carlo trials per point");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (0 = auto)");
  app.add_option("--r-tot", r_tot, "sum-rate grid: a,b,c or start:step:stop");
  app.add_option("-L,--slots", slots, "alignment slots for trace and verify");

  auto* sweep_cmd = app.add_subcommand("sweep", "power vs sum rate for each scheme, written as CSV");
  sweep_cmd->add_option("-o,--out", out, "output CSV path");

  auto* verify_cmd = app.add_subcommand("verify", "run the verification suite");
  std::string fault;
  bool skip_dp = false;
  verify_cmd->add_option("--inject-fault", fault, "negative control: 'curvature' corrupts eps''")
      ->check(CLI::IsMember({"curvature"}));
  verify_cmd->add_flag("--skip-dp", skip_dp, "skip the dynamic-programming checks");

  auto* trace_cmd = app.add_subcommand("trace", "slot-by-slot record of one frame");
  std::string scheme_name = "joint-bisection";
  std::uint64_t trace_seed = 1;
  trace_cmd->add_option("--scheme", scheme_name, "joint-bisection | joint-exhaustive | single-user");
  trace_cmd->add_option("--trace-seed", trace_seed, "seed of the traced frame");

  auto* config_cmd = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    const std::pair<const char*, std::string*> shorthands[] = {
        {"psi", &psi}, {"trials", &trials}, {"master_seed", &seed}, {"output", &out},
        {"threads", &threads}, {"r_tot", &r_tot}, {"slots", &slots}};
    for (const auto& [key, value] : shorthands) {
      if (!value->empty()) apply_setting(cfg, key, *value);
    }
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (*sweep_cmd) return cmd_sweep(cfg, std::cout, std::cerr);
  if (*verify_cmd) {
    VerifyOptions opt;
    opt.inject_curvature_fault = fault == "curvature";
    opt.skip_dp = skip_dp;
    return cmd_verify(cfg, opt, std::cout);
  }
  if (*trace_cmd) {
    try {
      return cmd_trace(cfg, parse_scheme(scheme_name), trace_seed, std::cout);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  if (*config_cmd) {
    std::cout << serialize_config(cfg);
    return kExitOk;
  }
  return kExitConfig;
}
