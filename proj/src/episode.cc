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

#include "hopper/episode.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "hopper/error.h"
#include "hopper/policy.h"

namespace hopper {
namespace {

std::string Num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kIo, "bad number in log: '" + s + "'");
  }
  return v;
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  return out;
}

const char* ModeName(ConversionMode mode) {
  return mode == ConversionMode::kTorqueMapping ? "torque" : "joint-target";
}

ConversionMode ParseMode(const std::string& s) {
  if (s == "torque") return ConversionMode::kTorqueMapping;
  if (s == "joint-target") return ConversionMode::kJointTargetMapping;
  throw Error(ErrorCode::kInvalidConfig, "unknown conversion mode " + s);
}

}  // namespace

RaibertAgent::RaibertAgent(const HopperConfig& config)
    : controller_(config.conversion.geometry, config.raibert,
                  config.sim.gravity) {}

void RaibertAgent::Reset() { controller_.Reset(); }

Vec3 RaibertAgent::Act(const Environment& env) {
  return controller_.Act(env.state(), env.clock(), env.options().command);
}

void EpisodeSpec::Validate() const {
  options.command.Validate();
  if (!(duration > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "duration must be positive");
  }
  for (const Perturbation& p : perturbations) {
    if (!(p.time >= 0.0 && p.time < duration) || !p.dv.allFinite()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "perturbation time outside [0, duration)");
    }
  }
  if (controller == ControllerKind::kPolicy && weights_path.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "policy controller needs weights");
  }
}

std::unique_ptr<Controller> MakeController(const HopperConfig& config,
                                           const EpisodeSpec& spec) {
  if (spec.controller == ControllerKind::kRaibert) {
    return std::make_unique<RaibertAgent>(config);
  }
  return std::make_unique<PolicyAgent>(Policy::Load(spec.weights_path));
}

bool EpisodeMetrics::fault() const {
  return termination != "completed" && termination.rfind("fall", 0) != 0;
}

double PositionTrackingError(const std::vector<PhysicsRow>& rows,
                             const Vec3& start, const Vec2& command_velocity) {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const PhysicsRow& row : rows) {
    Vec2 reference = start.head<2>() + command_velocity * row.state.time;
    sum += (row.state.body.pos.head<2>() - reference).squaredNorm();
  }
  return sum / static_cast<double>(rows.size());
}

namespace {

template <typename NextAction>
EpisodeResult Run(const HopperConfig& config, const EpisodeSpec& spec,
                  NextAction next_action) {
  spec.Validate();
  HopperConfig run_config = config;
  run_config.episode.horizon = spec.duration;
  Environment env(run_config);
  EpisodeResult result;
  env.SetRowCallback(
      [&result](const PhysicsRow& row) { result.rows.push_back(row); });
  env.Reset(spec.options);
  env.SetPerturbations(spec.perturbations);
  Vec3 start = env.state().body.pos;

  while (env.running()) {
    std::optional<Vec3> action = next_action(env);
    if (!action) break;
    result.actions.push_back(*action);
    try {
      env.Step(*action);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::kNonFiniteOutput, "controller produced NaN");
    }
  }

  EpisodeMetrics& m = result.metrics;
  m.physics_steps = static_cast<std::int64_t>(result.rows.size());
  m.surviving_time = env.state().time;
  m.termination = env.reason() == "horizon" || env.reason().empty()
                      ? "completed"
                      : env.reason();
  m.position_tracking_error = PositionTrackingError(
      result.rows, start, spec.options.command.velocity);
  return result;
}

}  // namespace

EpisodeResult RunEpisode(const HopperConfig& config, const EpisodeSpec& spec,
                         Controller& controller) {
  controller.Reset();
  return Run(config, spec, [&controller](const Environment& env) {
    return std::optional<Vec3>(controller.Act(env));
  });
}

EpisodeResult RunEpisode(const HopperConfig& config, const EpisodeSpec& spec) {
  std::unique_ptr<Controller> controller = MakeController(config, spec);
  return RunEpisode(config, spec, *controller);
}

EpisodeResult ReplayEpisode(const HopperConfig& config, const EpisodeSpec& spec,
                            const std::vector<Vec3>& actions) {
  std::size_t i = 0;
  return Run(config, spec, [&](const Environment&) -> std::optional<Vec3> {
    if (i >= actions.size()) return std::nullopt;
    return actions[i++];
  });
}

std::string LogHeader() {
  return "t,pos_x,pos_y,pos_z,quat_w,quat_x,quat_y,quat_z,"
         "vel_x,vel_y,vel_z,angvel_x,angvel_y,angvel_z,"
         "qP_1,qP_2,qP_3,qdP_1,qdP_2,qdP_3,tauP_1,tauP_2,tauP_3,"
         "tauS_roll,tauS_pitch,tauS_ext,qS_roll,qS_pitch,qS_ext,"
         "action_1,action_2,action_3,contact,normal_force,phase,reward";
}

void WriteLog(std::ostream& out, const EpisodeSpec& spec,
              const EpisodeResult& result) {
  const EpisodeOptions& o = spec.options;
  out << "# hopper trajectory log v1\n"
      << "# seed=" << o.seed << "\n"
      << "# terrain=" << o.terrain.ToString() << "\n"
      << "# vx=" << Num(o.command.velocity.x()) << "\n"
      << "# vy=" << Num(o.command.velocity.y()) << "\n"
      << "# period=" << Num(o.command.period) << "\n"
      << "# duration=" << Num(spec.duration) << "\n"
      << "# conversion=" << ModeName(o.mode) << "\n"
      << "# randomize=" << (o.randomize ? 1 : 0) << "\n"
      << "# controller="
      << (spec.controller == ControllerKind::kRaibert ? "raibert" : "policy")
      << "\n";
  for (const Perturbation& p : spec.perturbations) {
    out << "# perturbation=" << Num(p.time) << ";" << Num(p.dv.x()) << ";"
        << Num(p.dv.y()) << ";" << Num(p.dv.z()) << "\n";
  }
  for (const Vec3& a : result.actions) {
    out << "# action=" << Num(a.x()) << ";" << Num(a.y()) << ";"
        << Num(a.z()) << "\n";
  }
  const EpisodeMetrics& m = result.metrics;
  out << "# termination=" << m.termination << "\n"
      << "# surviving_time=" << Num(m.surviving_time) << "\n"
      << "# position_tracking_error=" << Num(m.position_tracking_error)
      << "\n";
  out << LogHeader() << "\n";
  for (const PhysicsRow& row : result.rows) {
    const SimState& s = row.state;
    const BodyState& b = s.body;
    std::string line = Num(s.time);
    auto add = [&line](double v) {
      line += ',';
      line += Num(v);
    };
    for (int i = 0; i < 3; ++i) add(b.pos[i]);
    add(b.orient.w());
    add(b.orient.x());
    add(b.orient.y());
    add(b.orient.z());
    for (int i = 0; i < 3; ++i) add(b.lin_vel[i]);
    for (int i = 0; i < 3; ++i) add(b.ang_vel[i]);
    for (int i = 0; i < 3; ++i) add(row.parallel.q[i]);
    for (int i = 0; i < 3; ++i) add(row.parallel.qd[i]);
    for (int i = 0; i < 3; ++i) add(row.parallel_torque[i]);
    for (int i = 0; i < 3; ++i) add(row.serial_torque[i]);
    for (int i = 0; i < 3; ++i) add(s.leg.q[i]);
    for (int i = 0; i < 3; ++i) add(row.action[i]);
    add(s.contact.in_contact ? 1.0 : 0.0);
    add(s.contact.normal_force);
    add(row.phase);
    add(row.reward);
    out << line << "\n";
  }
}

LoadedLog ReadLog(std::istream& in) {
  LoadedLog log;
  std::ostringstream text;
  std::map<std::string, std::string> meta;
  std::string line;
  EpisodeSpec& spec = log.spec;
  bool header = false;
  while (std::getline(in, line)) {
    text << line << "\n";
    if (line.rfind("# ", 0) != 0) {
      header = true;
      continue;
    }
    if (header) throw Error(ErrorCode::kIo, "metadata after header");
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(2, eq - 2);
    std::string value = line.substr(eq + 1);
    if (key == "perturbation" || key == "action") {
      std::vector<std::string> f = Split(value, ';');
      if (f.size() != (key == "action" ? 3u : 4u)) {
        throw Error(ErrorCode::kIo, "bad " + key + " line");
      }
      if (key == "action") {
        log.actions.emplace_back(ParseDouble(f[0]), ParseDouble(f[1]),
                                 ParseDouble(f[2]));
      } else {
        spec.perturbations.push_back(
            {ParseDouble(f[0]),
             Vec3(ParseDouble(f[1]), ParseDouble(f[2]), ParseDouble(f[3]))});
      }
    } else {
      meta[key] = value;
    }
  }
  auto get = [&meta](const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw Error(ErrorCode::kIo, "log lacks " + key);
    return it->second;
  };
  spec.options.seed = std::stoull(get("seed"));
  spec.options.terrain = Terrain::Parse(get("terrain"));
  spec.options.command.velocity =
      Vec2(ParseDouble(get("vx")), ParseDouble(get("vy")));
  spec.options.command.period = ParseDouble(get("period"));
  spec.options.mode = ParseMode(get("conversion"));
  spec.options.randomize = get("randomize") == "1";
  spec.duration = ParseDouble(get("duration"));
  spec.controller = get("controller") == "policy" ? ControllerKind::kPolicy
                                                  : ControllerKind::kRaibert;
  log.text = text.str();
  return log;
}

}  // namespace hopper
