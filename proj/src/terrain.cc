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

#include "hopper/terrain.h"

#include <charconv>
#include <cmath>
#include <numbers>

#include "hopper/error.h"

namespace hopper {

Terrain::Terrain(Kind kind, double slope_deg)
    : kind_(kind), slope_deg_(slope_deg) {
  if (!(std::abs(slope_deg) < 60.0)) {
    throw Error(ErrorCode::kInvalidConfig, "slope must be within +-60 degrees");
  }
  double angle = slope_deg * std::numbers::pi / 180.0;
  tan_slope_ = kind == Kind::kFlat ? 0.0 : std::tan(angle);
  normal_ = kind == Kind::kFlat ? Vec3::UnitZ()
                                : Vec3(-std::sin(angle), 0.0, std::cos(angle));
}

Terrain Terrain::Parse(std::string_view text) {
  if (text == "flat") return Flat();
  constexpr std::string_view kPrefix = "slope:";
  if (text.substr(0, kPrefix.size()) == kPrefix) {
    std::string_view number = text.substr(kPrefix.size());
    double degrees = 0.0;
    auto [end, ec] =
        std::from_chars(number.data(), number.data() + number.size(), degrees);
    if (ec == std::errc() && end == number.data() + number.size()) {
      return Slope(degrees);
    }
  }
  throw Error(ErrorCode::kInvalidConfig,
              "terrain must be 'flat' or 'slope:DEG', got '" +
                  std::string(text) + "'");
}

double Terrain::Height(double x, double /*y*/) const { return tan_slope_ * x; }

std::string Terrain::ToString() const {
  if (kind_ == Kind::kFlat) return "flat";
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), slope_deg_);
  return "slope:" + std::string(buffer, end);
}

}  // namespace hopper
