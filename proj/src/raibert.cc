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

#include "hopper/raibert.h"

#include <algorithm>
#include <cmath>

#include "hopper/error.h"

namespace hopper {
namespace {

Mat3 YawRotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

bool Reachable(const ChainGeometry& geometry, const Vec3& foot, Vec3* q) {
  try {
    *q = InverseKinematicsParallel(geometry, {foot});
  } catch (const Error&) {
    return false;
  }
  return (q->array() >= geometry.joint_min).all() &&
         (q->array() <= geometry.joint_max).all();
}

}  // namespace

RaibertController::RaibertController(const ChainGeometry& geometry,
                                     const RaibertConfig& config,
                                     double gravity)
    : geometry_(geometry), config_(config), gravity_(gravity) {
  nominal_length_ = -ForwardKinematicsParallel(geometry, Vec3::Zero()).x.z();
  Reset();
}

void RaibertController::Reset() {
  in_contact_ = false;
  touchdown_time_ = 0.0;
  stance_duration_ = 0.1;
  thrust_ = config_.thrust;
  touchdown_lag_ = 0.0;
  last_time_ = -1.0;
  velocity_error_integral_.setZero();
}

Vec2 RaibertController::FootPlacement(const Vec2& velocity,
                                      const Vec2& desired) const {
  Vec2 offset = velocity * stance_duration_ / 2.0 +
                config_.velocity_gain * (velocity - desired) -
                config_.velocity_integral_gain * velocity_error_integral_;
  double norm = offset.norm();
  if (norm > config_.max_offset) offset *= config_.max_offset / norm;
  return offset;
}

Vec3 RaibertController::SolveTarget(const Vec3& foot_body) const {
  Vec3 q;
  if (Reachable(geometry_, foot_body, &q)) return q;
  // bisect along the segment from the nominal stance foot
  Vec3 inside = Vec3(0.0, 0.0, -nominal_length_);
  Vec3 outside = foot_body;
  for (int i = 0; i < 40; ++i) {
    Vec3 mid = 0.5 * (inside + outside);
    Vec3 trial;
    if (Reachable(geometry_, mid, &trial)) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  if (!Reachable(geometry_, inside, &q)) q = Vec3::Zero();
  return q;
}

Vec3 RaibertController::FlightFootTarget(const SimState& state,
                                         const Command& command) const {
  Vec2 offset = FootPlacement(HeadingVelocity(state.body), command.velocity);
  double vertical = std::sqrt(std::max(
      0.0, nominal_length_ * nominal_length_ - offset.squaredNorm()));
  Vec3 heading(offset.x(), offset.y(), -vertical);
  double yaw = RollPitchYaw(state.body.orient)[2];
  return state.body.orient.toRotationMatrix().transpose() *
         (YawRotation(yaw) * heading);
}

Vec3 RaibertController::StanceFootTarget(const SimState& state,
                                         const PhaseClock& /*clock*/) const {
  Vec3 foot = ForwardKinematicsSerial(state.leg.q).x;
  Vec3 direction = foot.normalized();
  double extension = state.body.lin_vel.z() >= 0.0 ? thrust_ : 0.0;
  Vec3 rpy = RollPitchYaw(state.body.orient);
  const Vec3& w = state.body.ang_vel;
  Vec3 attitude(-(config_.attitude_kp * rpy[1] + config_.attitude_kd * w.y()),
                config_.attitude_kp * rpy[0] + config_.attitude_kd * w.x(),
                0.0);
  return (nominal_length_ + extension) * direction + attitude;
}

void RaibertController::TrackEvents(const SimState& state,
                                    const PhaseClock& clock,
                                    const Command& command) {
  bool contact = state.contact.in_contact;
  if (contact && !in_contact_) {
    touchdown_time_ = state.time;
    double t = clock.time_in_period();
    touchdown_lag_ = t < 0.5 * clock.period() ? t : t - clock.period();
  } else if (!contact && in_contact_) {
    stance_duration_ = std::clamp(state.time - touchdown_time_, 0.02,
                                  0.5 * command.period);
    double flight = command.period - stance_duration_ -
                    config_.phase_gain * touchdown_lag_;
    flight = std::max(flight, 0.05);
    // lift-off happens with the leg extended by the thrust
    double desired_speed = 0.5 * gravity_ * flight - thrust_ / flight;
    thrust_ = std::clamp(
        thrust_ + config_.thrust_adapt *
                      (desired_speed - state.body.lin_vel.z()),
        config_.thrust_min, config_.thrust_max);
  }
  in_contact_ = contact;
}

Vec3 RaibertController::Act(const SimState& state, const PhaseClock& clock,
                            const Command& command) {
  TrackEvents(state, clock, command);
  if (last_time_ >= 0.0) {
    velocity_error_integral_ +=
        (state.time - last_time_) *
        (command.velocity - HeadingVelocity(state.body));
    double limit = config_.velocity_integral_gain > 0.0
                       ? config_.velocity_integral_limit /
                             config_.velocity_integral_gain
                       : 0.0;
    velocity_error_integral_ =
        velocity_error_integral_.cwiseMax(-limit).cwiseMin(limit);
  }
  last_time_ = state.time;
  Vec3 foot = in_contact_ ? StanceFootTarget(state, clock)
                          : FlightFootTarget(state, command);
  return SolveTarget(foot);
}

}  // namespace hopper
