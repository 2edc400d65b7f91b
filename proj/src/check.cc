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

#include "hopper/check.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hopper/conversion.h"
#include "hopper/episode.h"
#include "hopper/error.h"
#include "hopper/geometry.h"
#include "hopper/simulator.h"

namespace hopper {
namespace {

using Clock = std::chrono::steady_clock;

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

Vec3 SampleParallel(std::mt19937_64& rng, const ChainGeometry& g) {
  for (;;) {
    Vec3 q(Uniform(rng, g.joint_min, g.joint_max),
           Uniform(rng, g.joint_min, g.joint_max),
           Uniform(rng, g.joint_min, g.joint_max));
    if (InWorkspace(g, q)) return q;
  }
}

Vec3 SampleSerial(std::mt19937_64& rng, const ChainGeometry& g,
                  const SerialLimits& limits) {
  for (;;) {
    Vec3 q(Uniform(rng, -limits.roll_max, limits.roll_max),
           Uniform(rng, -limits.pitch_max, limits.pitch_max),
           Uniform(rng, limits.ext_min, limits.ext_max));
    try {
      Vec3 qp = InverseKinematicsParallel(g, ForwardKinematicsSerial(q));
      if (InWorkspace(g, qp)) return q;
    } catch (const Error&) {
    }
  }
}

Mat3 CentralDifference(const std::function<Vec3(const Vec3&)>& f,
                       const Vec3& q, double h) {
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Unit(j) * h;
    J.col(j) = (f(q + e) - f(q - e)) / (2.0 * h);
  }
  return J;
}

double RelativeError(const Mat3& actual, const Mat3& expected) {
  double worst = 0.0;
  for (int i = 0; i < 9; ++i) {
    double denom = std::max(std::abs(expected(i)), 1e-6);
    worst = std::max(worst, std::abs(actual(i) - expected(i)) / denom);
  }
  return worst;
}

CheckResult Make(const std::string& suite, const std::string& name,
                 double value, double tolerance, Clock::time_point start,
                 std::string detail = {}) {
  CheckResult r;
  r.suite = suite;
  r.name = name;
  r.value = value;
  r.tolerance = tolerance;
  r.passed = std::isfinite(value) && value < tolerance;
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  r.detail = std::move(detail);
  return r;
}

void Kinematics(const HopperConfig& c, std::vector<CheckResult>& out) {
  const ChainGeometry& g = c.conversion.geometry;
  std::mt19937_64 rng(1);
  auto start = Clock::now();
  double roundtrip = 0.0, residual = 0.0;
  for (int n = 0; n < 10000; ++n) {
    Vec3 q = SampleParallel(rng, g);
    Vec3 x = ForwardKinematicsParallel(g, q).x;
    for (int i = 0; i < kNumChains; ++i) {
      residual = std::max(
          residual,
          std::abs((x - KneePosition(g, i, q[i])).squaredNorm() -
                   g.lower_link * g.lower_link));
    }
    roundtrip = std::max(
        roundtrip,
        (InverseKinematicsParallel(g, {x}) - q).cwiseAbs().maxCoeff());
  }
  out.push_back(Make("kinematics", "parallel_roundtrip_rad", roundtrip, 1e-9,
                     start));
  out.push_back(Make("kinematics", "constraint_residual_m2", residual, 1e-10,
                     start));
  double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
  out.push_back(Make("kinematics", "roundtrip_seconds", elapsed, 5.0, start));

  start = Clock::now();
  double serial = 0.0;
  for (int n = 0; n < 10000; ++n) {
    Vec3 q = SampleSerial(rng, g, c.conversion.serial_limits);
    Vec3 back = InverseKinematicsSerial(ForwardKinematicsSerial(q),
                                        c.conversion.serial_limits);
    serial = std::max(serial, (back - q).cwiseAbs().maxCoeff());
  }
  out.push_back(Make("kinematics", "serial_roundtrip", serial, 1e-9, start));
}

void Jacobians(const HopperConfig& c, std::vector<CheckResult>& out) {
  const ChainGeometry& g = c.conversion.geometry;
  std::mt19937_64 rng(2);
  auto start = Clock::now();
  double parallel = 0.0;
  for (int n = 0; n < 1000; ++n) {
    Vec3 q = SampleParallel(rng, g);
    Mat3 fd = CentralDifference(
        [&g](const Vec3& v) { return ForwardKinematicsParallel(g, v).x; }, q,
        1e-6);
    parallel = std::max(parallel, RelativeError(JacobianParallel(g, q), fd));
  }
  out.push_back(Make("jacobian", "parallel_vs_fd", parallel, 1e-5, start));
  start = Clock::now();
  double serial = 0.0;
  for (int n = 0; n < 1000; ++n) {
    Vec3 q = SampleSerial(rng, g, c.conversion.serial_limits);
    Mat3 fd = CentralDifference(
        [](const Vec3& v) { return ForwardKinematicsSerial(v).x; }, q, 1e-6);
    serial = std::max(serial, RelativeError(JacobianSerial(q), fd));
  }
  out.push_back(Make("jacobian", "serial_vs_fd", serial, 1e-5, start));
}

void Conversion(const HopperConfig& c, std::vector<CheckResult>& out) {
  const ChainGeometry& g = c.conversion.geometry;
  std::mt19937_64 rng(3);
  auto start = Clock::now();
  double power = 0.0, velocity = 0.0, force = 0.0;
  for (int n = 0; n < 1000; ++n) {
    SerialJointState s;
    s.q = SampleSerial(rng, g, c.conversion.serial_limits);
    for (int i = 0; i < 3; ++i) s.qd[i] = Uniform(rng, -2.0, 2.0);
    Vec3 tau(Uniform(rng, -12, 12), Uniform(rng, -12, 12),
             Uniform(rng, -12, 12));
    ParallelJointState p = SerialToParallelState(g, s);
    JointTorques ts =
        ParallelToSerialTorque(g, {tau, TorqueFrame::kParallel}, s);
    double pp = tau.dot(p.qd);
    power = std::max(power,
                     std::abs(ts.tau.dot(s.qd) - pp) / (std::abs(pp) + 1e-12));
    Mat3 jp = JacobianParallel(g, p.q);
    Mat3 js = JacobianSerial(s.q);
    velocity = std::max(velocity, (jp * p.qd - js * s.qd).cwiseAbs().maxCoeff());
    force = std::max(
        force, (FootForce(js, ts.tau) - FootForce(jp, tau)).cwiseAbs().maxCoeff());
  }
  out.push_back(Make("conversion", "virtual_work_relative", power, 1e-10,
                     start));
  out.push_back(Make("conversion", "foot_velocity_agreement", velocity, 1e-10,
                     start));
  out.push_back(Make("conversion", "foot_force_agreement", force, 1e-10,
                     start));
}

void Ballistic(const HopperConfig& c, std::vector<CheckResult>& out) {
  auto start = Clock::now();
  BodyState body;
  body.pos = Vec3(0.0, 0.0, 1.0);
  body.lin_vel = Vec3(0.3, -0.2, 1.5);
  const BodyState initial = body;
  const double dt = c.sim.dt;
  const int steps = static_cast<int>(std::lround(0.3 / dt));
  double worst = 0.0;
  for (int k = 1; k <= steps; ++k) {
    body = IntegrateBody(body, Vec3::Zero(), Vec3::Zero(), c.sim.body_mass,
                         c.sim.body_inertia, c.sim.gravity, dt);
    double t = k * dt;
    Vec3 exact = initial.pos + initial.lin_vel * t -
                 Vec3(0.0, 0.0, 0.5 * c.sim.gravity * t * t);
    worst = std::max(worst, (body.pos - exact).norm());
  }
  out.push_back(Make("ballistic", "parabola_error_m", worst, 1e-4, start));
}

void Determinism(const HopperConfig& c, std::vector<CheckResult>& out) {
  auto start = Clock::now();
  EpisodeSpec spec;
  spec.options.seed = 7;
  spec.options.randomize = true;
  spec.options.command.velocity = Vec2(0.2, 0.0);
  spec.duration = 2.0;
  spec.perturbations.push_back({1.0, Vec3(0.0, 0.4, 0.0)});
  auto log = [&](const EpisodeResult& r) {
    std::ostringstream s;
    WriteLog(s, spec, r);
    return s.str();
  };
  EpisodeResult first = RunEpisode(c, spec);
  EpisodeResult second = RunEpisode(c, spec);
  std::string a = log(first);
  out.push_back(Make("determinism", "repeat_run_mismatch",
                     a == log(second) ? 0.0 : 1.0, 0.5, start));
  start = Clock::now();
  EpisodeResult replay = ReplayEpisode(c, spec, first.actions);
  out.push_back(Make("determinism", "replay_mismatch",
                     a == log(replay) ? 0.0 : 1.0, 0.5, start));
}

}  // namespace

const std::vector<std::string>& CheckSuites() {
  static const std::vector<std::string> suites = {
      "kinematics", "jacobian", "conversion", "ballistic", "determinism"};
  return suites;
}

std::vector<CheckResult> RunChecks(const HopperConfig& config,
                                   const std::string& suite) {
  static const std::vector<
      std::pair<std::string, void (*)(const HopperConfig&,
                                      std::vector<CheckResult>&)>>
      table = {{"kinematics", Kinematics},
               {"jacobian", Jacobians},
               {"conversion", Conversion},
               {"ballistic", Ballistic},
               {"determinism", Determinism}};
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& [name, run] : table) {
    if (suite != "all" && suite != name) continue;
    found = true;
    try {
      run(config, out);
    } catch (const std::exception& e) {
      CheckResult r;
      r.suite = name;
      r.name = "exception";
      r.detail = e.what();
      out.push_back(r);
    }
  }
  if (!found) {
    throw Error(ErrorCode::kInvalidConfig, "unknown check suite " + suite);
  }
  return out;
}

std::string FormatCheckResult(const CheckResult& r) {
  nlohmann::json j = {{"suite", r.suite},     {"check", r.name},
                      {"pass", r.passed},     {"value", r.value},
                      {"tolerance", r.tolerance}, {"seconds", r.seconds}};
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump();
}

}  // namespace hopper
