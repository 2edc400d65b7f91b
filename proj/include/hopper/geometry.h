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

// Closed-form kinematics of the 3-RSR parallel leg and of the serial template
// leg (roll, pitch, prismatic extension) that stands in for it in simulation.
//
// Frames: the base frame has z up and its origin at the centre of the hip
// circle. The foot hangs below the base (negative z). Chain i sits in the
// frame obtained by yawing the base frame by ChainGeometry::chain_yaw[i];
// its hip pivot is at (0, r, 0) in that frame and the upper link swings in
// the chain's y-z plane.

#ifndef HOPPER_GEOMETRY_H_
#define HOPPER_GEOMETRY_H_

#include <array>
#include <numbers>

#include <Eigen/Dense>

namespace hopper {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Columns index joints, rows index foot coordinates.
using JacobianMatrix = Mat3;

inline constexpr int kNumChains = 3;

struct ChainGeometry {
  double hip_radius = 0.06;  // r, m
  double upper_link = 0.14;  // D, m
  double lower_link = 0.30;  // d, m
  std::array<double, kNumChains> chain_yaw = {
      0.0, 2.0 * std::numbers::pi / 3.0, 4.0 * std::numbers::pi / 3.0};
  // actuated hip joint range, rad
  double joint_min = -1.3;
  double joint_max = 1.3;

  // Throws Error(kInvalidConfig) when a geometric invariant is violated.
  void Validate() const;
};

struct SerialLimits {
  double roll_max = 0.8;   // |roll| bound, rad
  double pitch_max = 0.8;  // |pitch| bound, rad
  double ext_min = 0.12;   // m
  double ext_max = 0.40;   // m

  void Validate(const ChainGeometry& geometry) const;
};

// Hip motor angles and rates of the parallel leg.
struct ParallelJointState {
  Vec3 q = Vec3::Zero();
  Vec3 qd = Vec3::Zero();
};

// Template-model joints: q = (roll rad, pitch rad, extension m).
struct SerialJointState {
  Vec3 q = Vec3::Zero();
  Vec3 qd = Vec3::Zero();

  double roll() const { return q[0]; }
  double pitch() const { return q[1]; }
  double ext() const { return q[2]; }
};

// Foot coordinates in the body-fixed base frame, m.
struct FootPosition {
  Vec3 x = Vec3::Zero();
};

// Rotation of a chain frame about the base z axis.
Mat3 ChainRotation(const ChainGeometry& geometry, int chain);

// Knee of chain `chain` (0-based) at hip angle `angle`:
//   R_i * [0, r + D cos(angle), D sin(angle)].
Vec3 KneePosition(const ChainGeometry& geometry, int chain, double angle);

// Derivative of KneePosition with respect to the hip angle.
Vec3 KneeVelocityDirection(const ChainGeometry& geometry, int chain,
                           double angle);

// Foot position for hip angles q. Of the two intersections of the three
// lower-link spheres the lower one (foot below the base) is returned.
// Throws kUnreachable when the spheres do not meet and kSingular when the
// knee projections are collinear.
FootPosition ForwardKinematicsParallel(const ChainGeometry& geometry,
                                       const Vec3& q);

// Knee-out hip angles reaching `foot`. Throws kUnreachable when a chain
// cannot reach and kDegenerate when the foot lies on a chain's hip axis.
Vec3 InverseKinematicsParallel(const ChainGeometry& geometry,
                               const FootPosition& foot);

// d(IK)/dx at the foot position reached by q. Row i is
//   (x - k_i)^T / ((x - k_i) . dk_i/dq_i).
// Throws kSingular when a row diverges (lower link collinear with the upper
// link) or the matrix determinant falls below 1e-10.
Mat3 InverseKinematicsGradient(const ChainGeometry& geometry, const Vec3& q);

// J^P = (d(IK)/dx)^-1 evaluated at FK(q).
JacobianMatrix JacobianParallel(const ChainGeometry& geometry, const Vec3& q);

// Sine of the angle between chain i's lower link and its knee velocity
// direction, (x - k_i) . dk_i/dq_i / (D d). Negative in the knee-out assembly
// mode, zero at the workspace boundary.
Vec3 LeverSines(const ChainGeometry& geometry, const Vec3& q);

// q inside the joint limits, FK^P reachable, and every chain in the knee-out
// mode with lever sine below -margin. The IK returns the knee-out solution,
// so IK(FK(q)) = q holds exactly on this set.
bool InWorkspace(const ChainGeometry& geometry, const Vec3& q,
                 double margin = 0.05);

// Template leg: x = [e sin(p), e cos(p) sin(r), -e cos(p) cos(r)], i.e. the
// leg points straight down at zero angles, positive pitch swings the foot
// towards +x and positive roll swings it towards +y.
FootPosition ForwardKinematicsSerial(const Vec3& q);

// Exact inverse of ForwardKinematicsSerial on the branch roll in
// (-pi/2, pi/2). Throws kUnreachable when |x| is outside the extension
// limits and kDegenerate when the foot is not below the base.
Vec3 InverseKinematicsSerial(const FootPosition& foot,
                             const SerialLimits& limits = SerialLimits{});

JacobianMatrix JacobianSerial(const Vec3& q);

}  // namespace hopper

#endif  // HOPPER_GEOMETRY_H_
