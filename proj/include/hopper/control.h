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

// Gait schedule, policy observation and reward.

#ifndef HOPPER_CONTROL_H_
#define HOPPER_CONTROL_H_

#include <array>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "hopper/geometry.h"
#include "hopper/simulator.h"

namespace hopper {

using Vec2 = Eigen::Vector2d;

// Sawtooth phase that rises linearly from -2pi to 2pi over one gait period.
// Negative phase schedules stance, positive phase schedules swing.
class PhaseClock {
 public:
  explicit PhaseClock(double period);

  double period() const { return period_; }
  double time_in_period() const { return time_in_period_; }
  double phase() const;

  bool stance_scheduled() const { return phase() < 0.0; }

 private:
  friend PhaseClock PhaseAdvance(const PhaseClock& clock, double dt);

  double period_;
  double time_in_period_ = 0.0;
};

// Advances by dt (4 pi dt / T in phase), wrapping 2pi back to -2pi.
PhaseClock PhaseAdvance(const PhaseClock& clock, double dt);

struct Command {
  Vec2 velocity = Vec2::Zero();  // desired horizontal velocity, heading frame
  double period = 0.4;           // gait period T, s

  // |v| <= 0.6 m/s, T in [0.3, 0.5] s.
  void Validate() const;
};

// Fixed 17-entry policy input.
struct Observation {
  static constexpr std::size_t kSize = 17;
  static constexpr std::size_t kJointPos = 0;     // q^P (3)
  static constexpr std::size_t kRpy = 3;          // roll, pitch, yaw (3)
  static constexpr std::size_t kAngVel = 6;       // body angular velocity (3)
  static constexpr std::size_t kPhaseCos = 9;
  static constexpr std::size_t kPhaseSin = 10;
  static constexpr std::size_t kCommand = 11;     // v_d x, y (2)
  static constexpr std::size_t kPeriod = 13;
  static constexpr std::size_t kPrevAction = 14;  // a_{t-1} (3)

  std::array<double, kSize> values{};

  double operator[](std::size_t i) const { return values[i]; }
  Eigen::Map<const Eigen::Matrix<double, kSize, 1>> vector() const {
    return Eigen::Map<const Eigen::Matrix<double, kSize, 1>>(values.data());
  }
};

// Parallel joint positions come from the serial state through IK^P(FK^S).
// Throws Error(kUnreachable) when that conversion fails.
Observation BuildObservation(const ChainGeometry& geometry,
                             const SimState& state, const PhaseClock& clock,
                             const Command& command, const Vec3& prev_action);

// Little-endian IEEE-754 bytes of the observation, for byte-exact comparison.
std::string SerializeObservation(const Observation& obs);

// Heading frame: world frame yawed by the body's yaw.
Vec2 HeadingVelocity(const BodyState& body);

struct RewardWeights {
  double tracking = 1.0;
  double tracking_sigma = 0.25;  // m/s
  double phase = 0.5;
  double attitude = 0.3;
  double attitude_sigma = 0.2;  // rad
  double action_rate = 0.01;
  double torque = 2e-4;
};

struct RewardTerms {
  double tracking = 0.0;
  double phase = 0.0;
  double attitude = 0.0;
  double action_rate = 0.0;  // <= 0
  double torque = 0.0;       // <= 0

  double total() const {
    return tracking + phase + attitude + action_rate + torque;
  }
};

// tracking + phase-schedule match + level-body bonus, minus action-rate and
// serial torque penalties.
RewardTerms ComputeReward(const SimState& state, const PhaseClock& clock,
                          const Command& command, const Vec3& action,
                          const Vec3& prev_action, const Vec3& serial_torque,
                          const RewardWeights& weights = RewardWeights{});

// Largest attainable reward: every positive term at its maximum.
double RewardUpperBound(const RewardWeights& weights);

// Smallest attainable reward for actions inside the joint box and torques
// inside their clamps.
double RewardLowerBound(const RewardWeights& weights,
                        const ChainGeometry& geometry,
                        const Vec3& serial_tau_max);

}  // namespace hopper

#endif  // HOPPER_CONTROL_H_
