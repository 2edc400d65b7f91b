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

#ifndef HOPPER_TERRAIN_H_
#define HOPPER_TERRAIN_H_

#include <string>
#include <string_view>

#include "hopper/geometry.h"

namespace hopper {

// Ground surface. A slope rises along world +x; flat is a zero slope.
class Terrain {
 public:
  enum class Kind { kFlat, kSlope };

  static Terrain Flat() { return Terrain(Kind::kFlat, 0.0); }
  static Terrain Slope(double degrees) { return Terrain(Kind::kSlope, degrees); }

  // Parses "flat" or "slope:DEG". Throws Error(kInvalidConfig).
  static Terrain Parse(std::string_view text);

  Kind kind() const { return kind_; }
  double slope_deg() const { return slope_deg_; }

  double Height(double x, double y) const;
  Vec3 Normal() const { return normal_; }

  // Signed distance of a world point above the surface, along the normal.
  double Clearance(const Vec3& point) const { return normal_.dot(point); }

  std::string ToString() const;

 private:
  Terrain(Kind kind, double slope_deg);

  Kind kind_;
  double slope_deg_;
  double tan_slope_;
  Vec3 normal_;
};

}  // namespace hopper

#endif  // HOPPER_TERRAIN_H_
