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

// Serial <-> parallel conversion. The policy and the PD law live in parallel
// hip coordinates; the simulator only knows the serial template leg. States
// are mapped serial -> parallel through the shared foot point and torques are
// mapped back through the common foot force:
//
//   q^P   = IK^P(FK^S(q^S))
//   qd^P  = (J^P)^-1 J^S qd^S
//   tau^P = Kp (a - q^P) - Kd qd^P
//   tau^S = (J^S)^T (J^P)^-T tau^P

#ifndef HOPPER_CONVERSION_H_
#define HOPPER_CONVERSION_H_

#include "hopper/geometry.h"

namespace hopper {

struct PdGains {
  double kp = 20.0;  // Nm/rad
  double kd = 0.5;   // Nm s/rad

  void Validate() const;
};

enum class TorqueFrame { kParallel, kSerial };

struct JointTorques {
  Vec3 tau = Vec3::Zero();
  TorqueFrame frame = TorqueFrame::kParallel;
};

enum class ConversionMode { kTorqueMapping, kJointTargetMapping };

struct ConversionConfig {
  ChainGeometry geometry;
  SerialLimits serial_limits;
  PdGains gains;
  // |tau^P_i| bound per hip motor, Nm.
  double tau_max = 12.0;
  // Bound on the serial generalized forces (roll Nm, pitch Nm, ext N).
  Vec3 serial_tau_max = Vec3(30.0, 30.0, 300.0);
  // Per-joint PD gains of the joint-target baseline, applied directly in
  // serial coordinates (roll, pitch in Nm/rad; ext in N/m). Defaults match
  // the stiffness the parallel PD presents at the symmetric stance pose.
  Vec3 serial_kp = Vec3(61.22, 61.22, 3061.2);
  Vec3 serial_kd = Vec3(1.531, 1.531, 76.53);

  void Validate() const;
};

// Matched parallel configuration for a serial state. J^P is evaluated at
// IK^P(FK^S(q^S)) so both Jacobians describe the same foot point.
ParallelJointState SerialToParallelState(const ChainGeometry& geometry,
                                         const SerialJointState& serial);

// Parallel-frame PD law, clamped to +-tau_max.
JointTorques PdTorque(const Vec3& target, const ParallelJointState& state,
                      const PdGains& gains, double tau_max);

// Exact tau^S = (J^S)^T (J^P)^-T tau^P, no clamping. Throws kSingular.
JointTorques ParallelToSerialTorque(const ChainGeometry& geometry,
                                    const JointTorques& parallel,
                                    const SerialJointState& serial);

// Inverse map tau^P = (J^P)^T (J^S)^-T tau^S at the matched configuration.
JointTorques SerialToParallelTorque(const ChainGeometry& geometry,
                                    const JointTorques& serial,
                                    const SerialJointState& state);

// Force the foot exerts on its surroundings, F = J^-T tau, in the base frame.
Vec3 FootForce(const JacobianMatrix& jacobian, const Vec3& tau);

// Joint-target baseline: a^S = IK^S(FK^P(a^P)).
Vec3 JointTargetMapping(const ChainGeometry& geometry,
                        const SerialLimits& limits, const Vec3& parallel_target);

// Elementwise clamp; never flips a sign.
Vec3 ClampTorque(const Vec3& tau, const Vec3& bound);

struct Actuation {
  ParallelJointState parallel;
  JointTorques parallel_torque;  // tau^P (equivalent, in joint-target mode)
  JointTorques serial_torque;    // tau^S sent to the simulator
};

// One low-level control tick: map the serial state, run the PD law in the
// frame selected by `mode`, and produce clamped serial torques. `gain_scale`
// multiplies both PD gains (domain randomization).
Actuation Actuate(const ConversionConfig& config, ConversionMode mode,
                  const Vec3& parallel_target, const SerialJointState& serial,
                  double gain_scale = 1.0);

}  // namespace hopper

#endif  // HOPPER_CONVERSION_H_
