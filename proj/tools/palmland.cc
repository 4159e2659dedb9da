// Copyright 2026 The Palmland Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// palmland: headless runs, replays, trace audits and the live server.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "palmland/bridge.h"
#include "palmland/config.h"
#include "palmland/error.h"
#include "palmland/metrics.h"
#include "palmland/scenario.h"
#include "palmland/simulation.h"

namespace {

using namespace palmland;

constexpr int kExitError = 2;

struct Common {
  std::string config;
  std::string out;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--mode", c.mode, "tracking mode")
      ->check(CLI::IsMember({"dynamic", "ideal"}));
  cmd->add_option("--seed", c.seed, "scenario jitter seed");
  cmd->add_option("--duration-override", c.duration, "simulated seconds");
}

RunConfig base_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (!c.out.empty()) cfg.out = c.out;
  if (!c.mode.empty()) cfg.mode = tracking_mode_from_string(c.mode);
  if (c.seed) cfg.seed = c.seed;
  if (c.duration) cfg.duration_override = c.duration;
  return cfg;
}

void print_summary(const MetricsReport& r, const std::string& out) {
  std::printf("%s (%s): rmse %.4f m, delay %s, min chest distance %.3f m, "
              "violations %d, landed %s\n",
              r.scenario.c_str(), r.mode.c_str(), r.rmse,
              r.delay ? (std::to_string(*r.delay) + " s").c_str() : "undefined",
              r.safety.min_chest_drone, r.safety.setpoint_violations,
              r.landing.success ? "yes" : "no");
  if (!out.empty()) std::printf("wrote %s/trace.csv and %s/report.json\n", out.c_str(), out.c_str());
}

int execute(const RunConfig& cfg) {
  const RunResult result = run(cfg);
  write_outputs(result, cfg.out);
  print_summary(result.report, cfg.out);
  return exit_status(result.report);
}

std::pair<std::string, unsigned short> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw InvalidInput("--bind expects host:port");
  const std::string host = bind.substr(0, colon);
  const std::string port = bind.substr(colon + 1);
  std::size_t used = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(port, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (host.empty() || used != port.size() || value > 65535) {
    throw InvalidInput("--bind expects host:port, got '" + bind + "'");
  }
  return {host, static_cast<unsigned short>(value)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Palm-landing drone simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::string run_scenario;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario headlessly");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--scenario", run_scenario, "canonical name or scenario file");

  Common replay_opts;
  std::string replay_trace;
  auto* replay_cmd = app.add_subcommand("replay", "drive the user from a recorded trace");
  add_common(replay_cmd, replay_opts);
  replay_cmd->add_option("--trace", replay_trace, "user trace CSV")->required();

  std::string audit_trace;
  std::string audit_config;
  std::string audit_out;
  auto* audit_cmd = app.add_subcommand("audit", "compute metrics over an existing run trace");
  audit_cmd->add_option("--trace", audit_trace, "run trace CSV")->required();
  audit_cmd->add_option("--config", audit_config, "run configuration (JSON)");
  audit_cmd->add_option("--out", audit_out, "write the report here instead of stdout");

  auto* scen_cmd = app.add_subcommand("scenarios", "canonical scenarios");
  scen_cmd->require_subcommand(1);
  scen_cmd->add_subcommand("list", "print the canonical scenario names");
  std::string show_name;
  auto* show_cmd = scen_cmd->add_subcommand("show", "print a scenario as JSON");
  show_cmd->add_option("name", show_name, "scenario name or file")->required();
  std::string export_dir;
  auto* export_cmd = scen_cmd->add_subcommand("export", "write every canonical scenario file");
  export_cmd->add_option("dir", export_dir, "target directory")->required();

  std::string serve_config;
  std::string serve_scenario = "approach_static";
  std::string serve_bind = "127.0.0.1:8765";
  double time_scale = 1.0;
  auto* serve_cmd = app.add_subcommand("serve", "real-time web socket server");
  serve_cmd->add_option("--config", serve_config, "run configuration (JSON)");
  serve_cmd->add_option("--scenario", serve_scenario, "canonical name or scenario file");
  serve_cmd->add_option("--bind", serve_bind, "host:port");
  serve_cmd->add_option("--time-scale", time_scale, "sim seconds per wall second");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*run_cmd) {
      RunConfig cfg = base_config(run_opts);
      if (!run_scenario.empty()) {
        cfg.scenario = run_scenario;
        cfg.trace.clear();
      }
      if (cfg.scenario.empty() && cfg.trace.empty()) cfg.scenario = "approach_static";
      return execute(cfg);
    }
    if (*replay_cmd) {
      RunConfig cfg = base_config(replay_opts);
      cfg.trace = replay_trace;
      cfg.scenario.clear();
      return execute(cfg);
    }
    if (*audit_cmd) {
      const RunConfig cfg = audit_config.empty() ? RunConfig{} : load_run_config(audit_config);
      MetricsReport report = compute_report(load_run_trace(audit_trace), cfg.planner, cfg.metrics);
      report.scenario = std::filesystem::path(audit_trace).stem().string();
      report.mode = "audit";
      const std::string text = report_to_json(report).dump(2) + "\n";
      if (audit_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(audit_out, std::ios::binary);
        if (!out) throw Error("cannot write " + audit_out);
        out << text;
      }
      return exit_status(report);
    }
    if (*scen_cmd) {
      if (scen_cmd->got_subcommand("list")) {
        for (const auto& n : canonical_scenario_names()) std::cout << n << '\n';
      } else if (*show_cmd) {
        std::cout << scenario_to_json(resolve_scenario(show_name)).dump(2) << '\n';
      } else if (*export_cmd) {
        std::filesystem::create_directories(export_dir);
        for (const auto& n : canonical_scenario_names()) {
          const auto path = std::filesystem::path(export_dir) / (n + ".json");
          std::ofstream out(path, std::ios::binary);
          if (!out) throw Error("cannot write " + path.string());
          out << scenario_to_json(canonical_scenario(n)).dump(2) << '\n';
          std::cout << path.string() << '\n';
        }
      }
      return 0;
    }
    if (*serve_cmd) {
      RunConfig cfg = serve_config.empty() ? RunConfig{} : load_run_config(serve_config);
      cfg.scenario = serve_scenario;
      cfg.trace.clear();
      ServeOptions opts;
      std::tie(opts.address, opts.port) = parse_bind(serve_bind);
      opts.time_scale = time_scale;
      opts.handle_signals = true;
      BridgeServer server(cfg, opts);
      server.start();
      std::printf("serving %s on http://%s:%u (/ws, /healthz)\n", serve_scenario.c_str(),
                  opts.address.c_str(), static_cast<unsigned>(server.port()));
      std::fflush(stdout);
      server.wait();
      server.stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return 0;
}
