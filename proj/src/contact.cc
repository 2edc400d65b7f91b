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

#include "hopper/contact.h"

#include <algorithm>

namespace hopper {

ContactResult ComputeContact(const Vec3& foot_world, const Vec3& foot_velocity,
                             const Terrain& terrain,
                             const ContactParams& params,
                             const std::optional<Vec3>& anchor) {
  ContactResult result;
  result.state.foot_world = foot_world;

  const Vec3 normal = terrain.Normal();
  double penetration = -terrain.Clearance(foot_world);
  if (penetration <= 0.0) {
    return result;
  }
  double penetration_rate = -normal.dot(foot_velocity);
  double normal_force = std::max(
      0.0, params.stiffness * penetration + params.damping * penetration_rate);

  if (normal_force == 0.0) {
    // separating faster than the spring can push: no load, no contact
    return result;
  }
  result.state.in_contact = true;
  result.state.penetration = penetration;

  Vec3 tangent_velocity = foot_velocity - normal.dot(foot_velocity) * normal;
  Vec3 origin = anchor.value_or(foot_world);
  Vec3 stretch = foot_world - origin;
  stretch -= normal.dot(stretch) * normal;

  Vec3 tangential = -params.tangential_stiffness * stretch -
                    params.tangential_damping * tangent_velocity;
  double limit = params.friction * normal_force;
  double magnitude = tangential.norm();
  Vec3 new_anchor = foot_world - stretch;
  if (magnitude > limit) {
    tangential *= limit / magnitude;
    result.state.sliding = true;
    // spring alone carries the sliding force from the relocated anchor
    new_anchor = foot_world + tangential / params.tangential_stiffness;
    new_anchor -= normal.dot(new_anchor - foot_world) * normal;
  }

  result.force = normal_force * normal + tangential;
  result.state.normal_force = normal_force;
  result.state.anchor = new_anchor;
  return result;
}

}  // namespace hopper
