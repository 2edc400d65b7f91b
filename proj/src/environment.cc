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

#include "hopper/environment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "hopper/error.h"

namespace hopper {

Environment::Environment(const HopperConfig& config)
    : config_(config), sim_config_(config.sim), clock_(0.4) {
  config_.Validate();
}

void Environment::SetPerturbations(std::vector<Perturbation> perturbations) {
  std::stable_sort(perturbations.begin(), perturbations.end(),
                   [](const Perturbation& a, const Perturbation& b) {
                     return a.time < b.time;
                   });
  perturbations_ = std::move(perturbations);
  next_perturbation_ = 0;
  while (reset_ && next_perturbation_ < perturbations_.size() &&
         perturbations_[next_perturbation_].time < state_.time) {
    ++next_perturbation_;
  }
}

void Environment::SetRowCallback(
    std::function<void(const PhysicsRow&)> callback) {
  row_callback_ = std::move(callback);
}

Observation Environment::Reset(const EpisodeOptions& options) {
  options.command.Validate();
  options_ = options;
  sim_config_ = config_.sim;
  sim_config_.randomization.enabled = options.randomize;

  ResetResult start =
      hopper::Reset(config_.conversion, sim_config_, options_.terrain,
                    options_.seed);
  state_ = start.state;
  context_.conversion = &config_.conversion;
  context_.config = &sim_config_;
  context_.terrain = &options_.terrain;
  context_.params = start.params;
  clock_ = PhaseClock(options_.command.period);
  prev_action_ = start.parallel.q;
  next_perturbation_ = 0;
  reset_ = true;
  done_ = false;
  reason_.clear();
  control_steps_ = 0;
  observation_ = BuildObservation(config_.conversion.geometry, state_, clock_,
                                  options_.command, prev_action_);
  return observation_;
}

std::string Environment::FallReason() const {
  Vec3 rpy = RollPitchYaw(state_.body.orient);
  double limit = config_.episode.fall_angle;
  if (std::abs(rpy[0]) > limit || std::abs(rpy[1]) > limit) return "fall_tilt";
  const Vec3& p = state_.body.pos;
  if (p.z() - options_.terrain.Height(p.x(), p.y()) <
      config_.episode.fall_height) {
    return "fall_height";
  }
  return {};
}

PrivilegedState Environment::Privileged() const {
  PrivilegedState out;
  out.base_lin_vel = state_.body.lin_vel;
  out.contact = state_.contact.in_contact;
  out.params = context_.params;
  return out;
}

Transition Environment::Step(const Vec3& action) {
  if (!reset_) throw std::logic_error("step before reset");
  if (done_) throw std::logic_error("step after episode end");
  if (!action.allFinite()) throw std::invalid_argument("non-finite action");

  const ChainGeometry& geometry = config_.conversion.geometry;
  Vec3 target = action.cwiseMax(geometry.joint_min).cwiseMin(geometry.joint_max);
  const double dt = sim_config_.dt;
  const double horizon = config_.episode.horizon;

  rows_.clear();
  Vec3 last_serial_torque = Vec3::Zero();
  for (int i = 0; i < sim_config_.control_decimation && !done_; ++i) {
    while (next_perturbation_ < perturbations_.size() &&
           perturbations_[next_perturbation_].time <= state_.time + 1e-9) {
      state_ = ApplyPerturbation(state_, perturbations_[next_perturbation_].dv);
      ++next_perturbation_;
    }
    PhysicsRow row;
    try {
      Actuation act = Actuate(config_.conversion, options_.mode, target,
                              state_.leg, context_.params.gain_scale);
      state_ = hopper::Step(state_, act.serial_torque, context_);
      row.parallel = act.parallel;
      row.parallel_torque = act.parallel_torque.tau;
      row.serial_torque = act.serial_torque.tau;
      last_serial_torque = act.serial_torque.tau;
    } catch (const Error& e) {
      done_ = true;
      reason_ = ErrorCodeName(e.code());
      break;
    }
    clock_ = PhaseAdvance(clock_, dt);
    row.state = state_;
    row.action = target;
    row.phase = clock_.phase();
    rows_.push_back(row);
    if (std::string fall = FallReason(); !fall.empty()) {
      done_ = true;
      reason_ = fall;
    } else if (state_.time >= horizon - 1e-9) {
      done_ = true;
      reason_ = "horizon";
    }
  }
  ++control_steps_;

  Transition out;
  out.reward = ComputeReward(state_, clock_, options_.command, target,
                             prev_action_, last_serial_torque, config_.reward);
  prev_action_ = target;
  try {
    observation_ = BuildObservation(geometry, state_, clock_,
                                    options_.command, prev_action_);
  } catch (const Error& e) {
    // keep the last valid observation
    if (!done_) {
      done_ = true;
      reason_ = ErrorCodeName(e.code());
    }
  }
  out.obs = observation_;
  out.done = done_;
  out.reason = reason_;
  out.privileged = Privileged();
  if (row_callback_) {
    for (PhysicsRow& row : rows_) {
      row.reward = out.reward.total();
      row_callback_(row);
    }
  }
  return out;
}

}  // namespace hopper
