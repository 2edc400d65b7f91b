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

// Fixed-step dynamics of the floating-base hopper on the serial template leg.
//
// The leg links are treated as massless for the body: the ground force at the
// foot is the only external force besides gravity, and it acts on the body at
// the foot point. The leg joints carry a small virtual inertia so they have
// their own second-order dynamics, driven by the joint torques and by the
// ground force mapped through J^S. The hip sits at the body's centre of mass.

#ifndef HOPPER_SIMULATOR_H_
#define HOPPER_SIMULATOR_H_

#include <cstdint>

#include <Eigen/Geometry>

#include "hopper/contact.h"
#include "hopper/conversion.h"
#include "hopper/geometry.h"
#include "hopper/terrain.h"

namespace hopper {

using Quat = Eigen::Quaterniond;

struct RandomizationConfig {
  bool enabled = false;
  double mass_scale = 0.2;  // body mass scaled by U[1 - s, 1 + s]
  double friction_min = 0.4;
  double friction_max = 1.0;
  double stiffness_scale = 0.3;  // k_n scaled by U[1 - s, 1 + s]
  double gain_scale = 0.1;       // PD gains scaled by U[1 - s, 1 + s]
};

struct SimConfig {
  double dt = 0.002;           // physics and PD period, s
  int control_decimation = 10;  // physics steps per policy step
  double body_mass = 2.5;      // kg
  Vec3 body_inertia = Vec3(0.02, 0.02, 0.03);  // kg m^2, principal
  double gravity = 9.81;
  ContactParams contact;
  // Virtual leg inertia: roll, pitch in kg m^2, extension in kg.
  Vec3 leg_inertia = Vec3(0.01, 0.01, 0.25);
  double drop_height = 0.02;  // m above nominal stance at reset
  double divergence_limit = 1e6;
  RandomizationConfig randomization;

  double control_period() const { return dt * control_decimation; }
  void Validate() const;
};

// Per-episode physical parameters after domain randomization.
struct DynamicsParams {
  double body_mass = 2.5;
  ContactParams contact;
  double gain_scale = 1.0;
};

struct BodyState {
  Vec3 pos = Vec3::Zero();          // world, m
  Quat orient = Quat::Identity();   // body to world
  Vec3 lin_vel = Vec3::Zero();      // world, m/s
  Vec3 ang_vel = Vec3::Zero();      // body frame, rad/s
};

struct SimState {
  double time = 0.0;
  std::int64_t step = 0;
  BodyState body;
  SerialJointState leg;
  ContactState contact;
};

struct SimContext {
  const ConversionConfig* conversion = nullptr;
  const SimConfig* config = nullptr;
  const Terrain* terrain = nullptr;
  DynamicsParams params;
};

struct ResetResult {
  SimState state;
  ParallelJointState parallel;
  DynamicsParams params;
};

// Draws the randomized parameters for `seed` (or uses the nominal ones when
// randomization is disabled) and places the body at rest, nominal stance
// length plus the drop height above the terrain, with the leg in the
// symmetric stance pose.
ResetResult Reset(const ConversionConfig& conversion, const SimConfig& config,
                  const Terrain& terrain, std::uint64_t seed);

// Nominal stance foot position: FK^P of the symmetric pose q = 0.
FootPosition NominalStanceFoot(const ChainGeometry& geometry);

// Rigid-body update under a world force applied at `arm` (world-frame offset
// from the centre of mass) plus gravity. Velocities are advanced first;
// position uses the trapezoidal velocity average so constant-acceleration
// flight is integrated exactly.
BodyState IntegrateBody(const BodyState& body, const Vec3& force_world,
                        const Vec3& arm_world, double mass,
                        const Vec3& inertia, double gravity, double dt);

// One physics step with the given serial joint torques. Throws
// Error(kNumericalDiverged) when any state magnitude exceeds the divergence
// limit or becomes non-finite.
SimState Step(const SimState& state, const JointTorques& serial_torque,
              const SimContext& context);

// Instantaneous change of base linear velocity.
SimState ApplyPerturbation(const SimState& state, const Vec3& dv);

// World-frame foot position and velocity for the given state.
Vec3 FootWorld(const SimState& state);
Vec3 FootVelocityWorld(const SimState& state);

// Roll, pitch, yaw (ZYX) of an orientation, each wrapped to (-pi, pi].
Vec3 RollPitchYaw(const Quat& orient);

}  // namespace hopper

#endif  // HOPPER_SIMULATOR_H_
