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

// Episode runner, metrics, CSV trajectory log and log replay.

#ifndef HOPPER_EPISODE_H_
#define HOPPER_EPISODE_H_

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hopper/config.h"
#include "hopper/environment.h"
#include "hopper/raibert.h"

namespace hopper {

// Produces one action per control step.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual void Reset() = 0;
  virtual Vec3 Act(const Environment& env) = 0;
};

class RaibertAgent : public Controller {
 public:
  explicit RaibertAgent(const HopperConfig& config);
  void Reset() override;
  Vec3 Act(const Environment& env) override;
  const RaibertController& controller() const { return controller_; }

 private:
  RaibertController controller_;
};

enum class ControllerKind { kRaibert, kPolicy };

struct EpisodeSpec {
  EpisodeOptions options;
  double duration = 10.0;  // s
  ControllerKind controller = ControllerKind::kRaibert;
  std::string weights_path;  // policy controller only
  std::vector<Perturbation> perturbations;
  void Validate() const;
};

struct EpisodeMetrics {
  double surviving_time = 0.0;            // s
  double position_tracking_error = 0.0;   // m^2
  std::string termination;                // "completed", fall or fault name
  std::int64_t physics_steps = 0;
  bool fault() const;
};

struct EpisodeResult {
  EpisodeMetrics metrics;
  std::vector<Vec3> actions;    // one per control step
  std::vector<PhysicsRow> rows; // one per physics step
};

// Constructs the controller selected by spec.controller.
std::unique_ptr<Controller> MakeController(const HopperConfig& config,
                                           const EpisodeSpec& spec);

// Runs for spec.duration (the config horizon is raised to cover it) or until
// a fall or fault.
EpisodeResult RunEpisode(const HopperConfig& config, const EpisodeSpec& spec,
                         Controller& controller);
EpisodeResult RunEpisode(const HopperConfig& config, const EpisodeSpec& spec);

// Re-simulates a recorded action stream.
EpisodeResult ReplayEpisode(const HopperConfig& config, const EpisodeSpec& spec,
                            const std::vector<Vec3>& actions);

// Mean squared horizontal distance from the start point advanced at the
// commanded velocity (commands are in the heading frame at reset, which is
// the world frame).
double PositionTrackingError(const std::vector<PhysicsRow>& rows,
                             const Vec3& start, const Vec2& command_velocity);

// CSV log: '#'-prefixed metadata lines, a header, then one row per physics
// step with values printed round-trip exact.
void WriteLog(std::ostream& out, const EpisodeSpec& spec,
              const EpisodeResult& result);
std::string LogHeader();

struct LoadedLog {
  EpisodeSpec spec;
  std::vector<Vec3> actions;
  std::string text;
};
LoadedLog ReadLog(std::istream& in);

}  // namespace hopper

#endif  // HOPPER_EPISODE_H_
