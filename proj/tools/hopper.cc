// Copyright 2026 The Hopper Lab Authors
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

// Command-line front end: sim, serve, check, kin, replay.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hopper/check.h"
#include "hopper/config.h"
#include "hopper/episode.h"
#include "hopper/error.h"
#include "hopper/geometry.h"
#include "hopper/protocol.h"

namespace {

using hopper::Vec3;

void PrintListening(int port) {
  std::fprintf(stderr, "listening on %d\n", port);
  std::fflush(stderr);
}

int Sim(const hopper::HopperConfig& config, hopper::EpisodeSpec spec,
        const std::string& log_path) {
  hopper::EpisodeResult result = hopper::RunEpisode(config, spec);
  if (!log_path.empty()) {
    std::ofstream out(log_path);
    if (!out) throw hopper::Error(hopper::ErrorCode::kIo, "cannot write " + log_path);
    hopper::WriteLog(out, spec, result);
  }
  const hopper::EpisodeMetrics& m = result.metrics;
  nlohmann::json j = {{"surviving_time", m.surviving_time},
                      {"position_tracking_error", m.position_tracking_error},
                      {"termination", m.termination},
                      {"physics_steps", m.physics_steps}};
  std::cout << j.dump() << "\n";
  return m.fault() ? 2 : 0;
}

int Check(const std::string& config_path, const std::string& suite) {
  hopper::HopperConfig config;
  try {
    config = hopper::ResolveConfig(config_path);
  } catch (const hopper::Error& e) {
    hopper::CheckResult r;
    r.suite = "config";
    r.name = "validate";
    r.value = 1.0;
    r.tolerance = 0.5;
    r.detail = e.what();
    std::cout << hopper::FormatCheckResult(r) << "\n";
    std::cout << nlohmann::json{{"summary", "fail"}, {"passed", 0},
                                {"failed", 1}}.dump()
              << "\n";
    return 1;
  }
  std::vector<hopper::CheckResult> results = hopper::RunChecks(config, suite);
  int failed = 0;
  for (const hopper::CheckResult& r : results) {
    std::cout << hopper::FormatCheckResult(r) << "\n";
    if (!r.passed) ++failed;
  }
  std::cout << nlohmann::json{{"summary", failed ? "fail" : "pass"},
                              {"passed", results.size() - failed},
                              {"failed", failed}}.dump()
            << "\n";
  return failed ? 1 : 0;
}

int Kin(const hopper::HopperConfig& config, const std::string& direction,
        bool serial, const std::vector<double>& values) {
  Vec3 v(values[0], values[1], values[2]);
  const hopper::ChainGeometry& g = config.conversion.geometry;
  Vec3 out;
  if (direction == "fk") {
    out = serial ? hopper::ForwardKinematicsSerial(v).x
                 : hopper::ForwardKinematicsParallel(g, v).x;
  } else {
    out = serial ? hopper::InverseKinematicsSerial(
                       {v}, config.conversion.serial_limits)
                 : hopper::InverseKinematicsParallel(g, {v});
  }
  std::cout << nlohmann::json{out.x(), out.y(), out.z()}.dump() << "\n";
  return 0;
}

int Replay(const hopper::HopperConfig& config, const std::string& path,
           const std::string& weights) {
  std::ifstream in(path);
  if (!in) throw hopper::Error(hopper::ErrorCode::kIo, "cannot read " + path);
  hopper::LoadedLog log = hopper::ReadLog(in);
  log.spec.weights_path = weights.empty() ? "replay" : weights;
  hopper::EpisodeResult result =
      hopper::ReplayEpisode(config, log.spec, log.actions);
  std::ostringstream text;
  hopper::WriteLog(text, log.spec, result);
  bool same = text.str() == log.text;
  std::cout << nlohmann::json{{"identical", same},
                              {"physics_steps", result.rows.size()}}.dump()
            << "\n";
  return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-leg hopper laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "Config file (falls back to $HOPPER_CONFIG)");

  CLI::App* sim = app.add_subcommand("sim", "Run one episode");
  std::string controller = "raibert", weights, terrain = "flat",
              conversion = "torque", log_path;
  double vx = 0.0, vy = 0.0, period = 0.4, duration = 10.0;
  std::uint64_t seed = 0;
  bool randomize = false;
  std::vector<std::string> perturbations;
  sim->add_option("--controller", controller)
      ->check(CLI::IsMember({"raibert", "policy"}));
  sim->add_option("--weights", weights, "Policy weights file");
  sim->add_option("--terrain", terrain, "flat or slope:DEG");
  sim->add_option("--vx", vx, "Commanded forward speed, m/s");
  sim->add_option("--vy", vy, "Commanded lateral speed, m/s");
  sim->add_option("--period", period, "Gait period, s");
  sim->add_option("--duration", duration, "Episode length, s");
  sim->add_option("--seed", seed);
  sim->add_option("--conversion", conversion)
      ->check(CLI::IsMember({"torque", "joint-target"}));
  sim->add_option("--log", log_path, "CSV trajectory log");
  sim->add_flag("--randomize", randomize, "Domain randomization");
  sim->add_option("--perturb", perturbations,
                  "Velocity impulse T,DX,DY,DZ (repeatable)");

  CLI::App* serve = app.add_subcommand("serve", "Rollout protocol server");
  bool stdio = false;
  int port = -1;
  auto* stdio_flag = serve->add_flag("--stdio", stdio, "Serve on stdin/stdout");
  auto* port_opt = serve->add_option("--port", port, "TCP port on 127.0.0.1");
  stdio_flag->excludes(port_opt);
  port_opt->excludes(stdio_flag);

  CLI::App* check = app.add_subcommand("check", "Run invariant checks");
  std::string suite = "all";
  check->add_option("suite", suite, "kinematics, jacobian, conversion, "
                                    "ballistic, determinism or all");

  CLI::App* kin = app.add_subcommand("kin", "Kinematics utility");
  std::string direction;
  bool serial = false;
  std::vector<double> values;
  kin->add_option("direction", direction)
      ->required()
      ->check(CLI::IsMember({"fk", "ik"}));
  kin->add_option("values", values, "Three joint values or foot coordinates")
      ->required()
      ->expected(3);
  kin->add_flag("--serial", serial, "Use the serial template leg");

  CLI::App* replay = app.add_subcommand("replay", "Verify a trajectory log");
  std::string replay_path, replay_weights;
  replay->add_option("log", replay_path)->required();
  replay->add_option("--weights", replay_weights);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return Check(config_path, suite);
    hopper::HopperConfig config = hopper::ResolveConfig(config_path);
    if (*sim) {
      hopper::EpisodeSpec spec;
      spec.options.seed = seed;
      spec.options.terrain = hopper::Terrain::Parse(terrain);
      spec.options.command.velocity = hopper::Vec2(vx, vy);
      spec.options.command.period = period;
      spec.options.mode = conversion == "torque"
                              ? hopper::ConversionMode::kTorqueMapping
                              : hopper::ConversionMode::kJointTargetMapping;
      spec.options.randomize =
          randomize || config.sim.randomization.enabled;
      spec.duration = duration;
      spec.controller = controller == "raibert"
                            ? hopper::ControllerKind::kRaibert
                            : hopper::ControllerKind::kPolicy;
      spec.weights_path = weights;
      for (const std::string& p : perturbations) {
        double t, dx, dy, dz;
        if (std::sscanf(p.c_str(), "%lf,%lf,%lf,%lf", &t, &dx, &dy, &dz) != 4) {
          throw hopper::Error(hopper::ErrorCode::kInvalidConfig,
                              "--perturb expects T,DX,DY,DZ");
        }
        spec.perturbations.push_back({t, Vec3(dx, dy, dz)});
      }
      return Sim(config, spec, log_path);
    }
    if (*serve) {
      std::signal(SIGPIPE, SIG_IGN);
      hopper::ServeEnd end =
          stdio ? hopper::ServeFd(config, 0, 1)
                : hopper::ServeTcp(config, port < 0 ? 0 : port, PrintListening);
      std::fprintf(stderr, "session ended: %s\n", hopper::ServeEndName(end));
      return end == hopper::ServeEnd::kIoError ? 1 : 0;
    }
    if (*kin) return Kin(config, direction, serial, values);
    if (*replay) return Replay(config, replay_path, replay_weights);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
