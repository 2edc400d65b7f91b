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

#include "hopper/control.h"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>

#include "hopper/error.h"

namespace hopper {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative slack so accumulated dt sums wrap exactly once per period.
constexpr double kWrapSlack = 1e-9;

}  // namespace

PhaseClock::PhaseClock(double period) : period_(period) {
  if (!(period > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "gait period must be positive");
  }
}

double PhaseClock::phase() const {
  return -kTwoPi + 2.0 * kTwoPi * (time_in_period_ / period_);
}

PhaseClock PhaseAdvance(const PhaseClock& clock, double dt) {
  PhaseClock next = clock;
  next.time_in_period_ += dt;
  while (next.time_in_period_ >= next.period_ * (1.0 - kWrapSlack)) {
    next.time_in_period_ = std::max(0.0, next.time_in_period_ - next.period_);
  }
  return next;
}

void Command::Validate() const {
  if (!(velocity.norm() <= 0.6 + 1e-12)) {
    throw Error(ErrorCode::kInvalidConfig, "|v_d| must be <= 0.6 m/s");
  }
  if (!(period >= 0.3 - 1e-12 && period <= 0.5 + 1e-12)) {
    throw Error(ErrorCode::kInvalidConfig, "gait period must be in [0.3, 0.5] s");
  }
}

Vec2 HeadingVelocity(const BodyState& body) {
  double yaw = RollPitchYaw(body.orient)[2];
  double c = std::cos(yaw), s = std::sin(yaw);
  const Vec3& v = body.lin_vel;
  return Vec2(c * v.x() + s * v.y(), -s * v.x() + c * v.y());
}

Observation BuildObservation(const ChainGeometry& geometry,
                             const SimState& state, const PhaseClock& clock,
                             const Command& command, const Vec3& prev_action) {
  Observation obs;
  auto put = [&obs](std::size_t at, const auto& v) {
    for (int i = 0; i < v.size(); ++i) obs.values[at + i] = v[i];
  };
  put(Observation::kJointPos,
      InverseKinematicsParallel(geometry,
                                ForwardKinematicsSerial(state.leg.q)));
  put(Observation::kRpy, RollPitchYaw(state.body.orient));
  put(Observation::kAngVel, state.body.ang_vel);
  double phase = clock.phase();
  obs.values[Observation::kPhaseCos] = std::cos(phase);
  obs.values[Observation::kPhaseSin] = std::sin(phase);
  put(Observation::kCommand, command.velocity);
  obs.values[Observation::kPeriod] = command.period;
  put(Observation::kPrevAction, prev_action);
  return obs;
}

std::string SerializeObservation(const Observation& obs) {
  std::string bytes(Observation::kSize * sizeof(double), '\0');
  for (std::size_t i = 0; i < Observation::kSize; ++i) {
    auto bits = std::bit_cast<std::uint64_t>(obs.values[i]);
    for (int b = 0; b < 8; ++b) {
      bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return bytes;
}

RewardTerms ComputeReward(const SimState& state, const PhaseClock& clock,
                          const Command& command, const Vec3& action,
                          const Vec3& prev_action, const Vec3& serial_torque,
                          const RewardWeights& w) {
  RewardTerms terms;
  Vec2 error = HeadingVelocity(state.body) - command.velocity;
  terms.tracking =
      w.tracking * std::exp(-error.squaredNorm() /
                            (w.tracking_sigma * w.tracking_sigma));

  double phase = clock.phase();
  bool contact = state.contact.in_contact;
  bool matched = (contact && phase < 0.0) || (!contact && phase > 0.0);
  terms.phase = matched ? w.phase : 0.0;

  Vec3 rpy = RollPitchYaw(state.body.orient);
  double tilt = rpy[0] * rpy[0] + rpy[1] * rpy[1];
  terms.attitude =
      w.attitude * std::exp(-tilt / (w.attitude_sigma * w.attitude_sigma));

  terms.action_rate = -w.action_rate * (action - prev_action).squaredNorm();
  terms.torque = -w.torque * serial_torque.squaredNorm();
  return terms;
}

double RewardUpperBound(const RewardWeights& w) {
  return w.tracking + w.phase + w.attitude;
}

double RewardLowerBound(const RewardWeights& w, const ChainGeometry& geometry,
                        const Vec3& serial_tau_max) {
  double span = geometry.joint_max - geometry.joint_min;
  return -w.action_rate * 3.0 * span * span -
         w.torque * serial_tau_max.squaredNorm();
}

}  // namespace hopper
