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

// Built-in invariant checks, runnable from the command line.

#ifndef HOPPER_CHECK_H_
#define HOPPER_CHECK_H_

#include <string>
#include <vector>

#include "hopper/config.h"

namespace hopper {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured worst case
  double tolerance = 0.0;  // pass when value < tolerance
  double seconds = 0.0;
  std::string detail;
};

// kinematics, jacobian, conversion, ballistic, determinism.
const std::vector<std::string>& CheckSuites();

// Runs one suite or "all". Throws Error(kInvalidConfig) for unknown names.
std::vector<CheckResult> RunChecks(const HopperConfig& config,
                                   const std::string& suite);

// One JSON object per line.
std::string FormatCheckResult(const CheckResult& result);

}  // namespace hopper

#endif  // HOPPER_CHECK_H_
