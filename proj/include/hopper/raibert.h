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

// Raibert-style baseline hopping controller.
//
// Flight: place the foot at the neutral point v T_st / 2 plus a velocity
// correction k_v (v - v_d), at nominal leg length.
// Stance: hold the touchdown leg direction, add an axial thrust and shift the
// foot horizontally in proportion to the body attitude error so the hip
// torque levels the body.
//
// Thrust is scheduled on the phase clock and its amplitude is adapted hop to
// hop so that touchdowns land on the scheduled stance start.

#ifndef HOPPER_RAIBERT_H_
#define HOPPER_RAIBERT_H_

#include "hopper/control.h"
#include "hopper/geometry.h"
#include "hopper/simulator.h"

namespace hopper {

struct RaibertConfig {
  double velocity_gain = 0.05;    // k_v, s
  double velocity_integral_gain = 0.02; // m per m of accumulated speed error
  double velocity_integral_limit = 0.05;  // bound on the integral term, m
  double thrust = 0.03;           // nominal axial extension, m
  double thrust_min = 0.0;        // adaptation bounds, m
  double thrust_max = 0.06;
  double thrust_adapt = 0.03;     // m per (m/s) of lift-off speed error
  double phase_gain = 0.25;       // flight-time correction per touchdown lag
  double attitude_kp = 0.10;      // m of foot offset per rad
  double attitude_kd = 0.01;      // m of foot offset per rad/s
  double max_offset = 0.10;       // horizontal foot offset bound, m
};

class RaibertController {
 public:
  RaibertController(const ChainGeometry& geometry, const RaibertConfig& config,
                    double gravity);

  void Reset();

  // Desired parallel joint positions.
  Vec3 Act(const SimState& state, const PhaseClock& clock,
           const Command& command);

  // Flight foot target in the body frame.
  Vec3 FlightFootTarget(const SimState& state, const Command& command) const;

  // Neutral point plus velocity correction in the heading frame.
  Vec2 FootPlacement(const Vec2& velocity, const Vec2& desired) const;

  // Closest reachable joint target to a body-frame foot point.
  Vec3 SolveTarget(const Vec3& foot_body) const;

  double thrust() const { return thrust_; }
  double stance_duration() const { return stance_duration_; }

 private:
  Vec3 StanceFootTarget(const SimState& state, const PhaseClock& clock) const;
  void TrackEvents(const SimState& state, const PhaseClock& clock,
                   const Command& command);

  ChainGeometry geometry_;
  RaibertConfig config_;
  double gravity_;
  double nominal_length_;

  bool in_contact_ = false;
  double touchdown_time_ = 0.0;
  double stance_duration_;
  double thrust_;
  double touchdown_lag_ = 0.0;
  double last_time_ = -1.0;
  Vec2 velocity_error_integral_ = Vec2::Zero();  // m  // s, positive when landing late
  Vec3 stance_direction_ = -Vec3::UnitZ();  // heading frame, at touchdown
};

}  // namespace hopper

#endif  // HOPPER_RAIBERT_H_
