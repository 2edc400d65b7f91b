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

// Control-rate environment: one Step runs the PD, the conversion and
// `control_decimation` physics steps for a single action.

#ifndef HOPPER_ENVIRONMENT_H_
#define HOPPER_ENVIRONMENT_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hopper/config.h"
#include "hopper/control.h"
#include "hopper/conversion.h"
#include "hopper/simulator.h"
#include "hopper/terrain.h"

namespace hopper {

struct EpisodeOptions {
  std::uint64_t seed = 0;
  Terrain terrain = Terrain::Flat();
  Command command;
  ConversionMode mode = ConversionMode::kTorqueMapping;
  bool randomize = false;
};

struct Perturbation {
  double time = 0.0;  // s
  Vec3 dv = Vec3::Zero();
};

// Ground truth for the critic; never part of the observation.
struct PrivilegedState {
  Vec3 base_lin_vel = Vec3::Zero();
  bool contact = false;
  DynamicsParams params;
};

struct Transition {
  Observation obs;
  RewardTerms reward;
  bool done = false;
  std::string reason;  // empty while running
  PrivilegedState privileged;
};

// Everything logged for one physics step, after the step.
struct PhysicsRow {
  SimState state;
  ParallelJointState parallel;
  Vec3 parallel_torque = Vec3::Zero();
  Vec3 serial_torque = Vec3::Zero();
  Vec3 action = Vec3::Zero();
  double phase = 0.0;
  double reward = 0.0;  // reward of the enclosing control step
};

class Environment {
 public:
  explicit Environment(const HopperConfig& config);

  Observation Reset(const EpisodeOptions& options);
  // Action: desired parallel joint positions, clamped to the joint box.
  // Throws std::logic_error before Reset or after termination and
  // std::invalid_argument for non-finite actions.
  Transition Step(const Vec3& action);

  void SetPerturbations(std::vector<Perturbation> perturbations);
  // Called after every physics step; the reward field is filled in once the
  // control step ends, so rows are delivered in a batch at that point.
  void SetRowCallback(std::function<void(const PhysicsRow&)> callback);

  const HopperConfig& config() const { return config_; }
  const EpisodeOptions& options() const { return options_; }
  const SimState& state() const { return state_; }
  const PhaseClock& clock() const { return clock_; }
  const DynamicsParams& params() const { return context_.params; }
  const Vec3& prev_action() const { return prev_action_; }
  const Observation& observation() const { return observation_; }
  bool running() const { return reset_ && !done_; }
  std::int64_t control_steps() const { return control_steps_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string FallReason() const;
  PrivilegedState Privileged() const;

  HopperConfig config_;
  SimConfig sim_config_;  // randomization switched per episode
  EpisodeOptions options_;
  SimContext context_;
  SimState state_;
  PhaseClock clock_;
  Vec3 prev_action_ = Vec3::Zero();
  Observation observation_;
  std::vector<Perturbation> perturbations_;
  std::size_t next_perturbation_ = 0;
  std::function<void(const PhysicsRow&)> row_callback_;
  std::vector<PhysicsRow> rows_;
  bool reset_ = false;
  bool done_ = false;
  std::string reason_;
  std::int64_t control_steps_ = 0;
};

}  // namespace hopper

#endif  // HOPPER_ENVIRONMENT_H_
