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

#include "hopper/geometry.h"

#include <cmath>
#include <numbers>
#include <string>

#include "hopper/error.h"

namespace hopper {
namespace {

// |det(d IK / dx)| below this is treated as a singular configuration.
constexpr double kMinGradientDeterminant = 1e-10;

// (x - k) . dk/dq normalised by D*d is the sine of the angle between the
// lower link and the upper link; below this the IK derivative diverges.
constexpr double kMinLeverSine = 1e-9;

double WrapAngle(double angle) {
  angle = std::remainder(angle, 2.0 * std::numbers::pi);
  if (angle <= -std::numbers::pi) angle += 2.0 * std::numbers::pi;
  return angle;
}

void CheckChain(int chain) {
  if (chain < 0 || chain >= kNumChains) {
    throw std::out_of_range("chain index " + std::to_string(chain));
  }
}

}  // namespace

void ChainGeometry::Validate() const {
  if (!(hip_radius > 0.0 && upper_link > 0.0 && lower_link > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "link lengths r, D, d must be positive");
  }
  if (!(lower_link > hip_radius)) {
    throw Error(ErrorCode::kInvalidConfig,
                "lower link d must exceed hip radius r");
  }
  for (int i = 0; i < kNumChains; ++i) {
    double expected = 2.0 * std::numbers::pi * i / 3.0;
    if (std::abs(chain_yaw[i] - expected) > 1e-12) {
      throw Error(ErrorCode::kInvalidConfig,
                  "chain yaws must be 0, 2pi/3, 4pi/3");
    }
  }
  if (!(joint_min < joint_max)) {
    throw Error(ErrorCode::kInvalidConfig, "joint_min must be < joint_max");
  }
}

void SerialLimits::Validate(const ChainGeometry& geometry) const {
  if (!(ext_min > 0.0 && ext_min < ext_max &&
        ext_max <= geometry.upper_link + geometry.lower_link)) {
    throw Error(ErrorCode::kInvalidConfig,
                "extension limits need 0 < ext_min < ext_max <= D + d");
  }
  if (!(roll_max > 0.0 && roll_max < std::numbers::pi / 2 &&
        pitch_max > 0.0 && pitch_max < std::numbers::pi / 2)) {
    throw Error(ErrorCode::kInvalidConfig,
                "roll/pitch limits must lie in (0, pi/2)");
  }
}

Mat3 ChainRotation(const ChainGeometry& geometry, int chain) {
  CheckChain(chain);
  return Eigen::AngleAxisd(geometry.chain_yaw[chain], Vec3::UnitZ())
      .toRotationMatrix();
}

Vec3 KneePosition(const ChainGeometry& geometry, int chain, double angle) {
  Vec3 local(0.0, geometry.hip_radius + geometry.upper_link * std::cos(angle),
             geometry.upper_link * std::sin(angle));
  return ChainRotation(geometry, chain) * local;
}

Vec3 KneeVelocityDirection(const ChainGeometry& geometry, int chain,
                           double angle) {
  Vec3 local(0.0, -geometry.upper_link * std::sin(angle),
             geometry.upper_link * std::cos(angle));
  return ChainRotation(geometry, chain) * local;
}

FootPosition ForwardKinematicsParallel(const ChainGeometry& geometry,
                                       const Vec3& q) {
  std::array<Vec3, kNumChains> knee;
  for (int i = 0; i < kNumChains; ++i) {
    knee[i] = KneePosition(geometry, i, q[i]);
  }

  // Differences of the sphere equations are linear in x:
  //   A [x1 x2]^T = B + C x3
  Eigen::Matrix2d a;
  a << 2.0 * (knee[0].x() - knee[1].x()), 2.0 * (knee[0].y() - knee[1].y()),
      2.0 * (knee[2].x() - knee[1].x()), 2.0 * (knee[2].y() - knee[1].y());
  Eigen::Vector2d b(knee[0].squaredNorm() - knee[1].squaredNorm(),
                    knee[2].squaredNorm() - knee[1].squaredNorm());
  Eigen::Vector2d c(-2.0 * (knee[0].z() - knee[1].z()),
                    -2.0 * (knee[2].z() - knee[1].z()));

  double det = a.determinant();
  double scale = a.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > kMinGradientDeterminant * scale * scale)) {
    throw Error(ErrorCode::kSingular, "knee projections are collinear");
  }
  Eigen::Matrix2d a_inv = a.inverse();
  Eigen::Vector2d offset = a_inv * b;
  Eigen::Vector2d slope = a_inv * c;

  // x = base + u * dir, with |x - k_1|^2 = d^2 quadratic in u
  Vec3 base(offset.x(), offset.y(), 0.0);
  Vec3 dir(slope.x(), slope.y(), 1.0);
  Vec3 w = base - knee[0];
  double qa = dir.squaredNorm();
  double qb = w.dot(dir);
  double qc = w.squaredNorm() -
              geometry.lower_link * geometry.lower_link;
  double disc = qb * qb - qa * qc;
  if (!(disc >= 0.0)) {
    throw Error(ErrorCode::kUnreachable,
                "lower-link spheres do not intersect");
  }
  // smaller root (foot below the base); qa >= 1 so no cancellation issue
  double u = (-qb - std::sqrt(disc)) / qa;
  return FootPosition{base + u * dir};
}

Vec3 InverseKinematicsParallel(const ChainGeometry& geometry,
                               const FootPosition& foot) {
  const double upper = geometry.upper_link;
  const double lower = geometry.lower_link;
  Vec3 q;
  for (int i = 0; i < kNumChains; ++i) {
    Vec3 p = ChainRotation(geometry, i).transpose() * foot.x -
             Vec3(0.0, geometry.hip_radius, 0.0);
    double rho = std::hypot(p.y(), p.z());
    if (!(rho > 1e-12)) {
      throw Error(ErrorCode::kDegenerate,
                  "foot on hip axis of chain " + std::to_string(i));
    }
    double cosine =
        (p.squaredNorm() + upper * upper - lower * lower) / (2.0 * upper * rho);
    if (!(cosine >= -1.0 && cosine <= 1.0)) {
      throw Error(ErrorCode::kUnreachable,
                  "chain " + std::to_string(i) + " cannot reach foot");
    }
    q[i] = WrapAngle(std::acos(cosine) + std::atan2(p.z(), p.y()));
  }
  return q;
}

Mat3 InverseKinematicsGradient(const ChainGeometry& geometry, const Vec3& q) {
  Vec3 x = ForwardKinematicsParallel(geometry, q).x;
  const double lever_scale = geometry.upper_link * geometry.lower_link;
  Mat3 gradient;
  for (int i = 0; i < kNumChains; ++i) {
    Vec3 link = x - KneePosition(geometry, i, q[i]);
    double lever = link.dot(KneeVelocityDirection(geometry, i, q[i]));
    if (!(std::abs(lever) > kMinLeverSine * lever_scale)) {
      throw Error(ErrorCode::kSingular,
                  "chain " + std::to_string(i) + " at workspace boundary");
    }
    gradient.row(i) = link.transpose() / lever;
  }
  if (!(std::abs(gradient.determinant()) >= kMinGradientDeterminant)) {
    throw Error(ErrorCode::kSingular, "IK gradient determinant vanishes");
  }
  return gradient;
}

JacobianMatrix JacobianParallel(const ChainGeometry& geometry, const Vec3& q) {
  return InverseKinematicsGradient(geometry, q).inverse();
}

Vec3 LeverSines(const ChainGeometry& geometry, const Vec3& q) {
  Vec3 x = ForwardKinematicsParallel(geometry, q).x;
  Vec3 sines;
  for (int i = 0; i < kNumChains; ++i) {
    Vec3 link = x - KneePosition(geometry, i, q[i]);
    sines[i] = link.dot(KneeVelocityDirection(geometry, i, q[i])) /
               (geometry.upper_link * geometry.lower_link);
  }
  return sines;
}

bool InWorkspace(const ChainGeometry& geometry, const Vec3& q, double margin) {
  if ((q.array() < geometry.joint_min).any() ||
      (q.array() > geometry.joint_max).any()) {
    return false;
  }
  try {
    return (LeverSines(geometry, q).array() < -margin).all();
  } catch (const Error&) {
    return false;
  }
}

FootPosition ForwardKinematicsSerial(const Vec3& q) {
  const double roll = q[0], pitch = q[1], ext = q[2];
  return FootPosition{Vec3(ext * std::sin(pitch),
                           ext * std::cos(pitch) * std::sin(roll),
                           -ext * std::cos(pitch) * std::cos(roll))};
}

Vec3 InverseKinematicsSerial(const FootPosition& foot,
                             const SerialLimits& limits) {
  const Vec3& x = foot.x;
  double ext = x.norm();
  if (!(ext >= limits.ext_min && ext <= limits.ext_max)) {
    throw Error(ErrorCode::kUnreachable, "foot distance outside extension limits");
  }
  if (!(-x.z() > 1e-12 * ext)) {
    throw Error(ErrorCode::kDegenerate, "foot not below the base");
  }
  double roll = std::atan2(x.y(), -x.z());
  double pitch = std::atan2(x.x(), std::hypot(x.y(), x.z()));
  return Vec3(roll, pitch, ext);
}

JacobianMatrix JacobianSerial(const Vec3& q) {
  const double cr = std::cos(q[0]), sr = std::sin(q[0]);
  const double cp = std::cos(q[1]), sp = std::sin(q[1]);
  const double ext = q[2];
  JacobianMatrix j;
  j.col(0) << 0.0, ext * cp * cr, ext * cp * sr;
  j.col(1) << ext * cp, -ext * sp * sr, ext * sp * cr;
  j.col(2) << sp, cp * sr, -cp * cr;
  return j;
}

}  // namespace hopper
