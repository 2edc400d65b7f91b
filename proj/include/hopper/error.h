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

#ifndef HOPPER_ERROR_H_
#define HOPPER_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hopper {

enum class ErrorCode {
  kUnreachable,
  kSingular,
  kDegenerate,
  kNumericalDiverged,
  kWeightShapeMismatch,
  kNonFiniteOutput,
  kInvalidConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Exception carrying a machine-readable fault code. Simulator faults end an
// episode; the code is reported as the episode's fault reason.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hopper

#endif  // HOPPER_ERROR_H_
