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

#include "hopper/error.h"

namespace hopper {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreachable:
      return "unreachable";
    case ErrorCode::kSingular:
      return "singular";
    case ErrorCode::kDegenerate:
      return "degenerate";
    case ErrorCode::kNumericalDiverged:
      return "numerical_diverged";
    case ErrorCode::kWeightShapeMismatch:
      return "weight_shape_mismatch";
    case ErrorCode::kNonFiniteOutput:
      return "non_finite_output";
    case ErrorCode::kInvalidConfig:
      return "invalid_config";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace hopper
