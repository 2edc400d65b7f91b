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

#include "hopper/conversion.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hopper/error.h"

namespace hopper {
namespace {

void ExpectFrame(const JointTorques& torques, TorqueFrame frame) {
  if (torques.frame != frame) {
    throw std::invalid_argument("joint torques given in the wrong frame");
  }
}

// Solves J^T y = tau, rejecting singular J.
Vec3 SolveTransposed(const JacobianMatrix& jacobian, const Vec3& tau,
                     const char* what) {
  Eigen::PartialPivLU<Mat3> lu(jacobian.transpose());
  if (!(std::abs(lu.determinant()) > 1e-12)) {
    throw Error(ErrorCode::kSingular, what);
  }
  return lu.solve(tau);
}

}  // namespace

void PdGains::Validate() const {
  if (!(kp > 0.0 && kd >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "PD gains need kp > 0, kd >= 0");
  }
}

void ConversionConfig::Validate() const {
  geometry.Validate();
  serial_limits.Validate(geometry);
  gains.Validate();
  if (!(serial_kp.array() > 0.0).all() || !(serial_kd.array() >= 0.0).all()) {
    throw Error(ErrorCode::kInvalidConfig, "serial PD gains need kp > 0, kd >= 0");
  }
  if (!(tau_max > 0.0) || !(serial_tau_max.array() > 0.0).all()) {
    throw Error(ErrorCode::kInvalidConfig, "torque bounds must be positive");
  }
}

ParallelJointState SerialToParallelState(const ChainGeometry& geometry,
                                         const SerialJointState& serial) {
  ParallelJointState parallel;
  parallel.q =
      InverseKinematicsParallel(geometry, ForwardKinematicsSerial(serial.q));
  Vec3 foot_velocity = JacobianSerial(serial.q) * serial.qd;
  // (J^P)^-1 is exactly the IK gradient
  parallel.qd = InverseKinematicsGradient(geometry, parallel.q) * foot_velocity;
  return parallel;
}

JointTorques PdTorque(const Vec3& target, const ParallelJointState& state,
                      const PdGains& gains, double tau_max) {
  Vec3 tau = gains.kp * (target - state.q) - gains.kd * state.qd;
  return {ClampTorque(tau, Vec3::Constant(tau_max)), TorqueFrame::kParallel};
}

JointTorques ParallelToSerialTorque(const ChainGeometry& geometry,
                                    const JointTorques& parallel,
                                    const SerialJointState& serial) {
  ExpectFrame(parallel, TorqueFrame::kParallel);
  Vec3 q_parallel =
      InverseKinematicsParallel(geometry, ForwardKinematicsSerial(serial.q));
  Vec3 force = SolveTransposed(JacobianParallel(geometry, q_parallel),
                               parallel.tau, "parallel Jacobian");
  return {JacobianSerial(serial.q).transpose() * force, TorqueFrame::kSerial};
}

JointTorques SerialToParallelTorque(const ChainGeometry& geometry,
                                    const JointTorques& serial,
                                    const SerialJointState& state) {
  ExpectFrame(serial, TorqueFrame::kSerial);
  Vec3 force = SolveTransposed(JacobianSerial(state.q), serial.tau,
                               "serial Jacobian");
  Vec3 q_parallel =
      InverseKinematicsParallel(geometry, ForwardKinematicsSerial(state.q));
  return {JacobianParallel(geometry, q_parallel).transpose() * force,
          TorqueFrame::kParallel};
}

Vec3 FootForce(const JacobianMatrix& jacobian, const Vec3& tau) {
  return SolveTransposed(jacobian, tau, "foot force Jacobian");
}

Vec3 JointTargetMapping(const ChainGeometry& geometry,
                        const SerialLimits& limits,
                        const Vec3& parallel_target) {
  return InverseKinematicsSerial(
      ForwardKinematicsParallel(geometry, parallel_target), limits);
}

Vec3 ClampTorque(const Vec3& tau, const Vec3& bound) {
  return tau.cwiseMax(-bound).cwiseMin(bound);
}

Actuation Actuate(const ConversionConfig& config, ConversionMode mode,
                  const Vec3& parallel_target, const SerialJointState& serial,
                  double gain_scale) {
  Actuation out;
  out.parallel = SerialToParallelState(config.geometry, serial);
  if (mode == ConversionMode::kTorqueMapping) {
    PdGains gains{config.gains.kp * gain_scale, config.gains.kd * gain_scale};
    out.parallel_torque =
        PdTorque(parallel_target, out.parallel, gains, config.tau_max);
    JointTorques serial_torque =
        ParallelToSerialTorque(config.geometry, out.parallel_torque, serial);
    out.serial_torque = {ClampTorque(serial_torque.tau, config.serial_tau_max),
                         TorqueFrame::kSerial};
  } else {
    Vec3 serial_target = JointTargetMapping(
        config.geometry, config.serial_limits, parallel_target);
    Vec3 tau = gain_scale *
               (config.serial_kp.cwiseProduct(serial_target - serial.q) -
                config.serial_kd.cwiseProduct(serial.qd));
    out.serial_torque = {ClampTorque(tau, config.serial_tau_max),
                         TorqueFrame::kSerial};
    out.parallel_torque =
        SerialToParallelTorque(config.geometry, out.serial_torque, serial);
  }
  return out;
}

}  // namespace hopper
