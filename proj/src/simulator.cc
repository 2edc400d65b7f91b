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

#include "hopper/simulator.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hopper/error.h"

namespace hopper {
namespace {

// Portable U[lo, hi) from a 64-bit engine; std distributions are not
// reproducible across standard library implementations.
double Uniform(std::mt19937_64& rng, double lo, double hi) {
  double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

void CheckFinite(const SimState& state, double limit) {
  auto bad = [limit](const auto& v) {
    return !v.allFinite() || v.cwiseAbs().maxCoeff() > limit;
  };
  const BodyState& b = state.body;
  if (bad(b.pos) || bad(b.lin_vel) || bad(b.ang_vel) ||
      bad(b.orient.coeffs()) || bad(state.leg.q) || bad(state.leg.qd)) {
    throw Error(ErrorCode::kNumericalDiverged,
                "state diverged at t=" + std::to_string(state.time));
  }
}

// Hard stops on the template joints: clamp and drop the outward velocity.
void ApplyJointLimits(SerialJointState& leg, const SerialLimits& limits) {
  const Vec3 lower(-limits.roll_max, -limits.pitch_max, limits.ext_min);
  const Vec3 upper(limits.roll_max, limits.pitch_max, limits.ext_max);
  for (int i = 0; i < 3; ++i) {
    if (leg.q[i] < lower[i]) {
      leg.q[i] = lower[i];
      leg.qd[i] = std::max(leg.qd[i], 0.0);
    } else if (leg.q[i] > upper[i]) {
      leg.q[i] = upper[i];
      leg.qd[i] = std::min(leg.qd[i], 0.0);
    }
  }
}

}  // namespace

void SimConfig::Validate() const {
  if (!(dt > 0.0) || control_decimation < 1) {
    throw Error(ErrorCode::kInvalidConfig, "dt and decimation must be positive");
  }
  if (std::abs(control_period() - 0.02) > 1e-12) {
    throw Error(ErrorCode::kInvalidConfig,
                "dt * control_decimation must equal the 0.02 s policy period");
  }
  if (!(body_mass > 0.0) || !(body_inertia.array() > 0.0).all() ||
      !(leg_inertia.array() > 0.0).all() || !(gravity >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "mass, inertias and gravity must be positive");
  }
  if (!(contact.stiffness > 0.0 && contact.damping >= 0.0 &&
        contact.tangential_stiffness > 0.0 &&
        contact.tangential_damping >= 0.0 && contact.friction >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid contact parameters");
  }
  const RandomizationConfig& r = randomization;
  if (!(r.mass_scale >= 0.0 && r.mass_scale < 1.0 && r.stiffness_scale >= 0.0 &&
        r.stiffness_scale < 1.0 && r.gain_scale >= 0.0 && r.gain_scale < 1.0 &&
        r.friction_min >= 0.0 && r.friction_min <= r.friction_max)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid randomization ranges");
  }
  if (!(drop_height >= 0.0) || !(divergence_limit > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid drop height or limit");
  }
}

FootPosition NominalStanceFoot(const ChainGeometry& geometry) {
  return ForwardKinematicsParallel(geometry, Vec3::Zero());
}

ResetResult Reset(const ConversionConfig& conversion, const SimConfig& config,
                  const Terrain& terrain, std::uint64_t seed) {
  ResetResult out;
  DynamicsParams& params = out.params;
  params.body_mass = config.body_mass;
  params.contact = config.contact;
  params.gain_scale = 1.0;
  if (config.randomization.enabled) {
    const RandomizationConfig& r = config.randomization;
    std::mt19937_64 rng(seed);
    params.body_mass *= Uniform(rng, 1.0 - r.mass_scale, 1.0 + r.mass_scale);
    params.contact.friction = Uniform(rng, r.friction_min, r.friction_max);
    params.contact.stiffness *=
        Uniform(rng, 1.0 - r.stiffness_scale, 1.0 + r.stiffness_scale);
    params.gain_scale = Uniform(rng, 1.0 - r.gain_scale, 1.0 + r.gain_scale);
  }

  FootPosition stance = NominalStanceFoot(conversion.geometry);
  SimState& state = out.state;
  state.body.pos =
      Vec3(0.0, 0.0,
           terrain.Height(0.0, 0.0) - stance.x.z() + config.drop_height);
  state.leg.q = InverseKinematicsSerial(stance, conversion.serial_limits);
  state.contact.foot_world = FootWorld(state);
  out.parallel = SerialToParallelState(conversion.geometry, state.leg);
  return out;
}

BodyState IntegrateBody(const BodyState& body, const Vec3& force_world,
                        const Vec3& arm_world, double mass,
                        const Vec3& inertia, double gravity, double dt) {
  BodyState next = body;
  Vec3 accel = force_world / mass - Vec3(0.0, 0.0, gravity);
  next.lin_vel = body.lin_vel + dt * accel;
  next.pos = body.pos + 0.5 * dt * (body.lin_vel + next.lin_vel);

  Mat3 rotation = body.orient.toRotationMatrix();
  Vec3 moment = rotation.transpose() * arm_world.cross(force_world);
  const Vec3& w = body.ang_vel;
  Vec3 gyroscopic = w.cross(inertia.cwiseProduct(w));
  next.ang_vel = w + dt * (moment - gyroscopic).cwiseQuotient(inertia);

  double angle = next.ang_vel.norm() * dt;
  if (angle > 0.0) {
    Quat delta(Eigen::AngleAxisd(angle, next.ang_vel.normalized()));
    next.orient = body.orient * delta;
  }
  next.orient.normalize();
  return next;
}

SimState Step(const SimState& state, const JointTorques& serial_torque,
              const SimContext& context) {
  if (serial_torque.frame != TorqueFrame::kSerial) {
    throw std::invalid_argument("simulator expects serial-frame torques");
  }
  const SimConfig& config = *context.config;
  const double dt = config.dt;

  Mat3 rotation = state.body.orient.toRotationMatrix();
  Vec3 foot_body = ForwardKinematicsSerial(state.leg.q).x;
  Vec3 foot_world = state.body.pos + rotation * foot_body;
  Vec3 foot_velocity = FootVelocityWorld(state);
  ContactResult contact =
      ComputeContact(foot_world, foot_velocity, *context.terrain,
                     context.params.contact, state.contact.anchor);

  SimState next = state;
  next.contact = contact.state;

  // leg joints: virtual inertia driven by joint torques and the ground force
  Vec3 force_body = rotation.transpose() * contact.force;
  Vec3 generalized = serial_torque.tau +
                     JacobianSerial(state.leg.q).transpose() * force_body;
  next.leg.qd = state.leg.qd + dt * generalized.cwiseQuotient(config.leg_inertia);
  next.leg.q = state.leg.q + dt * next.leg.qd;
  ApplyJointLimits(next.leg, context.conversion->serial_limits);

  next.body = IntegrateBody(state.body, contact.force, rotation * foot_body,
                            context.params.body_mass, config.body_inertia,
                            config.gravity, dt);
  next.step = state.step + 1;
  next.time = static_cast<double>(next.step) * dt;
  CheckFinite(next, config.divergence_limit);
  return next;
}

SimState ApplyPerturbation(const SimState& state, const Vec3& dv) {
  SimState next = state;
  next.body.lin_vel += dv;
  return next;
}

Vec3 FootWorld(const SimState& state) {
  return state.body.pos + state.body.orient.toRotationMatrix() *
                              ForwardKinematicsSerial(state.leg.q).x;
}

Vec3 FootVelocityWorld(const SimState& state) {
  Vec3 foot_body = ForwardKinematicsSerial(state.leg.q).x;
  Vec3 relative = state.body.ang_vel.cross(foot_body) +
                  JacobianSerial(state.leg.q) * state.leg.qd;
  return state.body.lin_vel + state.body.orient.toRotationMatrix() * relative;
}

Vec3 RollPitchYaw(const Quat& q) {
  double roll = std::atan2(2.0 * (q.w() * q.x() + q.y() * q.z()),
                           1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y()));
  double sin_pitch = std::clamp(2.0 * (q.w() * q.y() - q.z() * q.x()), -1.0, 1.0);
  double pitch = std::asin(sin_pitch);
  double yaw = std::atan2(2.0 * (q.w() * q.z() + q.x() * q.y()),
                          1.0 - 2.0 * (q.y() * q.y() + q.z() * q.z()));
  return Vec3(roll, pitch, yaw);
}

}  // namespace hopper
