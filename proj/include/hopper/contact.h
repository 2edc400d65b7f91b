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

// Compliant point contact between the foot and the terrain.

#ifndef HOPPER_CONTACT_H_
#define HOPPER_CONTACT_H_

#include <optional>

#include "hopper/geometry.h"
#include "hopper/terrain.h"

namespace hopper {

struct ContactParams {
  double stiffness = 5000.0;             // k_n, N/m
  double damping = 50.0;                 // c_n, N s/m
  double tangential_stiffness = 5000.0;  // N/m
  double tangential_damping = 50.0;      // N s/m
  double friction = 0.8;                 // mu
};

struct ContactState {
  bool in_contact = false;
  double penetration = 0.0;  // m, >= 0
  Vec3 foot_world = Vec3::Zero();
  double normal_force = 0.0;  // N, >= 0
  bool sliding = false;
  // Tangential spring anchor, set at touchdown and dragged while sliding.
  std::optional<Vec3> anchor;
};

struct ContactResult {
  Vec3 force = Vec3::Zero();  // world force on the foot
  ContactState state;
};

// Normal force F_n = max(0, k_n * pen + c_n * d(pen)/dt) along the terrain
// normal; tangential spring-damper to the touchdown anchor, limited to the
// friction cone |F_t| <= mu F_n. When the cone is active the anchor is moved
// so the spring carries exactly the sliding force.
ContactResult ComputeContact(const Vec3& foot_world, const Vec3& foot_velocity,
                             const Terrain& terrain,
                             const ContactParams& params,
                             const std::optional<Vec3>& anchor);

}  // namespace hopper

#endif  // HOPPER_CONTACT_H_
