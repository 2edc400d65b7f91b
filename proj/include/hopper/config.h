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

// Project configuration and its INI-style text format.
//
//   # comment
//   [geometry]
//   r = 0.06        # SI units throughout
//
// Keys are addressed as section.key. Unknown keys are an error so typos do not
// silently fall back to defaults. See docs/config.md for the full key list.

#ifndef HOPPER_CONFIG_H_
#define HOPPER_CONFIG_H_

#include <map>
#include <string>
#include <string_view>

#include "hopper/control.h"
#include "hopper/conversion.h"
#include "hopper/raibert.h"
#include "hopper/simulator.h"

namespace hopper {

struct EpisodeConfig {
  double horizon = 20.0;      // s, protocol episodes
  double fall_angle = 0.6;    // |roll| or |pitch| limit, rad
  double fall_height = 0.05;  // minimum base height above terrain, m
};

struct ServerConfig {
  double timeout = 30.0;  // s without a complete request before closing
};

struct HopperConfig {
  ConversionConfig conversion;
  SimConfig sim;
  RewardWeights reward;
  RaibertConfig raibert;
  EpisodeConfig episode;
  ServerConfig server;

  // Throws Error(kInvalidConfig) naming the first violated invariant.
  void Validate() const;
};

// Flat "section.key" -> value map of a config text. Throws kInvalidConfig on
// syntax errors.
std::map<std::string, std::string> ParseKeyValues(std::string_view text);

// Applies the keys in `text` on top of `base` and validates the result.
HopperConfig ParseConfig(std::string_view text,
                         const HopperConfig& base = HopperConfig{});

HopperConfig LoadConfig(const std::string& path);

// Resolves --config, then $HOPPER_CONFIG, then built-in defaults.
HopperConfig ResolveConfig(const std::string& cli_path);

// Every key with its current value, in the file format.
std::string DumpConfig(const HopperConfig& config);

}  // namespace hopper

#endif  // HOPPER_CONFIG_H_
