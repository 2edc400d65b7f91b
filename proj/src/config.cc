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

#include "hopper/config.h"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

#include "hopper/error.h"

namespace hopper {
namespace {

struct Binding {
  const char* key;
  std::variant<double*, int*, bool*> target;
};

std::vector<Binding> Bindings(HopperConfig& c) {
  ConversionConfig& v = c.conversion;
  SimConfig& s = c.sim;
  return {
      {"geometry.r", &v.geometry.hip_radius},
      {"geometry.D", &v.geometry.upper_link},
      {"geometry.d", &v.geometry.lower_link},
      {"geometry.joint_min", &v.geometry.joint_min},
      {"geometry.joint_max", &v.geometry.joint_max},
      {"serial.roll_max", &v.serial_limits.roll_max},
      {"serial.pitch_max", &v.serial_limits.pitch_max},
      {"serial.ext_min", &v.serial_limits.ext_min},
      {"serial.ext_max", &v.serial_limits.ext_max},
      {"pd.kp", &v.gains.kp},
      {"pd.kd", &v.gains.kd},
      {"pd.tau_max", &v.tau_max},
      {"pd.serial_tau_max_roll", &v.serial_tau_max[0]},
      {"pd.serial_tau_max_pitch", &v.serial_tau_max[1]},
      {"pd.serial_tau_max_ext", &v.serial_tau_max[2]},
      {"pd.serial_kp_roll", &v.serial_kp[0]},
      {"pd.serial_kp_pitch", &v.serial_kp[1]},
      {"pd.serial_kp_ext", &v.serial_kp[2]},
      {"pd.serial_kd_roll", &v.serial_kd[0]},
      {"pd.serial_kd_pitch", &v.serial_kd[1]},
      {"pd.serial_kd_ext", &v.serial_kd[2]},
      {"sim.dt", &s.dt},
      {"sim.control_decimation", &s.control_decimation},
      {"sim.body_mass", &s.body_mass},
      {"sim.inertia_xx", &s.body_inertia[0]},
      {"sim.inertia_yy", &s.body_inertia[1]},
      {"sim.inertia_zz", &s.body_inertia[2]},
      {"sim.gravity", &s.gravity},
      {"sim.contact_stiffness", &s.contact.stiffness},
      {"sim.contact_damping", &s.contact.damping},
      {"sim.tangential_stiffness", &s.contact.tangential_stiffness},
      {"sim.tangential_damping", &s.contact.tangential_damping},
      {"sim.friction", &s.contact.friction},
      {"sim.leg_inertia_roll", &s.leg_inertia[0]},
      {"sim.leg_inertia_pitch", &s.leg_inertia[1]},
      {"sim.leg_mass_ext", &s.leg_inertia[2]},
      {"sim.drop_height", &s.drop_height},
      {"sim.divergence_limit", &s.divergence_limit},
      {"randomization.enabled", &s.randomization.enabled},
      {"randomization.mass_scale", &s.randomization.mass_scale},
      {"randomization.friction_min", &s.randomization.friction_min},
      {"randomization.friction_max", &s.randomization.friction_max},
      {"randomization.stiffness_scale", &s.randomization.stiffness_scale},
      {"randomization.gain_scale", &s.randomization.gain_scale},
      {"reward.tracking", &c.reward.tracking},
      {"reward.tracking_sigma", &c.reward.tracking_sigma},
      {"reward.phase", &c.reward.phase},
      {"reward.attitude", &c.reward.attitude},
      {"reward.attitude_sigma", &c.reward.attitude_sigma},
      {"reward.action_rate", &c.reward.action_rate},
      {"reward.torque", &c.reward.torque},
      {"raibert.velocity_gain", &c.raibert.velocity_gain},
      {"raibert.velocity_integral_gain", &c.raibert.velocity_integral_gain},
      {"raibert.velocity_integral_limit", &c.raibert.velocity_integral_limit},
      {"raibert.thrust", &c.raibert.thrust},
      {"raibert.thrust_min", &c.raibert.thrust_min},
      {"raibert.thrust_max", &c.raibert.thrust_max},
      {"raibert.thrust_adapt", &c.raibert.thrust_adapt},
      {"raibert.phase_gain", &c.raibert.phase_gain},
      {"raibert.attitude_kp", &c.raibert.attitude_kp},
      {"raibert.attitude_kd", &c.raibert.attitude_kd},
      {"raibert.max_offset", &c.raibert.max_offset},
      {"episode.horizon", &c.episode.horizon},
      {"episode.fall_angle", &c.episode.fall_angle},
      {"episode.fall_height", &c.episode.fall_height},
      {"server.timeout", &c.server.timeout},
  };
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCode::kInvalidConfig, message);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    Fail("bad value for " + key + ": '" + value + "'");
  }
  return out;
}

void Assign(const Binding& binding, const std::string& value) {
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") {
            *target = true;
          } else if (value == "false" || value == "0") {
            *target = false;
          } else {
            Fail(std::string("bad boolean for ") + binding.key);
          }
        } else {
          *target = ParseNumber<T>(binding.key, value);
        }
      },
      binding.target);
}

}  // namespace

void HopperConfig::Validate() const {
  conversion.Validate();
  sim.Validate();
  if (!(episode.horizon > 0.0 && episode.fall_angle > 0.0 &&
        episode.fall_height >= 0.0)) {
    Fail("episode horizon and fall thresholds must be positive");
  }
  if (!(server.timeout > 0.0)) Fail("server timeout must be positive");
  if (!(raibert.thrust_min <= raibert.thrust &&
        raibert.thrust <= raibert.thrust_max && raibert.max_offset > 0.0)) {
    Fail("raibert thrust must lie within [thrust_min, thrust_max]");
  }
}

std::map<std::string, std::string> ParseKeyValues(std::string_view text) {
  std::map<std::string, std::string> values;
  std::string section;
  std::istringstream lines{std::string(text)};
  std::string raw;
  int number = 0;
  while (std::getline(lines, raw)) {
    ++number;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') Fail("line " + std::to_string(number) + ": bad section");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail("line " + std::to_string(number) + ": expected key = value");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      Fail("line " + std::to_string(number) + ": empty key or value");
    }
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

HopperConfig ParseConfig(std::string_view text, const HopperConfig& base) {
  HopperConfig config = base;
  std::vector<Binding> bindings = Bindings(config);
  for (const auto& [key, value] : ParseKeyValues(text)) {
    auto it = std::find_if(bindings.begin(), bindings.end(),
                           [&](const Binding& b) { return key == b.key; });
    if (it == bindings.end()) Fail("unknown key " + key);
    Assign(*it, value);
  }
  config.Validate();
  return config;
}

HopperConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

HopperConfig ResolveConfig(const std::string& cli_path) {
  if (!cli_path.empty()) return LoadConfig(cli_path);
  if (const char* env = std::getenv("HOPPER_CONFIG"); env && *env) {
    return LoadConfig(env);
  }
  HopperConfig config;
  config.Validate();
  return config;
}

std::string DumpConfig(const HopperConfig& config) {
  HopperConfig copy = config;
  std::ostringstream out;
  std::string section;
  for (const Binding& b : Bindings(copy)) {
    std::string_view key = b.key;
    auto dot = key.find('.');
    std::string_view this_section = key.substr(0, dot);
    if (this_section != section) {
      if (!section.empty()) out << "\n";
      section = std::string(this_section);
      out << "[" << section << "]\n";
    }
    out << key.substr(dot + 1) << " = ";
    std::visit(
        [&](auto* target) {
          if constexpr (std::is_same_v<std::remove_pointer_t<decltype(target)>,
                                       bool>) {
            out << (*target ? "true" : "false");
          } else if constexpr (std::is_same_v<
                                   std::remove_pointer_t<decltype(target)>,
                                   double>) {
            char buf[32];
            auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), *target);
            out.write(buf, end - buf);
          } else {
            out << *target;
          }
        },
        b.target);
    out << "\n";
  }
  return out.str();
}

}  // namespace hopper
