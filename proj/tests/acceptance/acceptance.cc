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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopper/config.h"
#include "hopper/conversion.h"
#include "hopper/episode.h"
#include "hopper/geometry.h"
#include "hopper/protocol.h"
#include "hopper/simulator.h"
#include "../test_util.h"

namespace hopper {
namespace {

using Clock = std::chrono::steady_clock;
using testing::SampleParallel;
using testing::SampleSerial;
using testing::Uniform;

constexpr int kSeeds = 5;

int g_failures = 0;

void Report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// knee written out by hand, chains yawed by 120 degrees
Vec3 Knee(const ChainGeometry& g, int chain, double q) {
  double yaw = 2.0 * std::numbers::pi * chain / 3.0;
  double y = g.hip_radius + g.upper_link * std::cos(q);
  return Vec3(-std::sin(yaw) * y, std::cos(yaw) * y, g.upper_link * std::sin(q));
}

void KinematicsRoundtrip(const HopperConfig& config) {
  const ChainGeometry& g = config.conversion.geometry;
  std::mt19937_64 rng(1);
  std::vector<Vec3> samples(10000);
  for (Vec3& q : samples) q = SampleParallel(rng, g);
  auto start = Clock::now();
  double angle_err = 0.0, residual = 0.0;
  for (const Vec3& q : samples) {
    FootPosition foot = ForwardKinematicsParallel(g, q);
    Vec3 back = InverseKinematicsParallel(g, foot);
    angle_err = std::max(angle_err, (back - q).cwiseAbs().maxCoeff());
    for (int i = 0; i < 3; ++i) {
      double r = (foot.x - Knee(g, i, q[i])).squaredNorm() -
                 g.lower_link * g.lower_link;
      residual = std::max(residual, std::abs(r));
    }
  }
  double elapsed = Seconds(start);
  Report("kinematics_roundtrip",
         angle_err < 1e-9 && residual < 1e-10 && elapsed < 5.0,
         Fmt("max|ik(fk(q))-q|=%.3g rad (<1e-9) residual=%.3g m^2 (<1e-10) "
             "time=%.3f s (<5) n=10000",
             angle_err, residual, elapsed));
}

Mat3 FiniteDifference(const std::function<Vec3(const Vec3&)>& f, const Vec3& q,
                      double h) {
  Mat3 j;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Unit(c) * h;
    j.col(c) = (f(q + e) - f(q - e)) / (2.0 * h);
  }
  return j;
}

// Relative error on the matrix scale: elementwise denominators below 1e-6
// of the largest entry would only measure floating-point cancellation.
double RelativeError(const Mat3& analytic, const Mat3& numeric) {
  double floor = 1e-6 * numeric.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double denom = std::max(std::abs(numeric(i, j)), floor);
      worst = std::max(worst, std::abs(analytic(i, j) - numeric(i, j)) / denom);
    }
  }
  return worst;
}

void Jacobians(const HopperConfig& config) {
  const ChainGeometry& g = config.conversion.geometry;
  std::mt19937_64 rng(2);
  double worst_p = 0.0, worst_s = 0.0;
  for (int n = 0; n < 1000; ++n) {
    Vec3 qp = SampleParallel(rng, g);
    Mat3 num_p = FiniteDifference(
        [&](const Vec3& q) { return ForwardKinematicsParallel(g, q).x; }, qp,
        1e-6);
    worst_p = std::max(worst_p, RelativeError(JacobianParallel(g, qp), num_p));
    Vec3 qs = SampleSerial(rng, g, config.conversion.serial_limits);
    Mat3 num_s = FiniteDifference(
        [](const Vec3& q) { return ForwardKinematicsSerial(q).x; }, qs, 1e-6);
    worst_s = std::max(worst_s, RelativeError(JacobianSerial(qs), num_s));
  }
  Report("jacobian_fd",
         worst_p < 1e-5 && worst_s < 1e-5,
         Fmt("parallel=%.3g serial=%.3g relative (<1e-5) n=1000", worst_p,
             worst_s));
}

void VirtualWork(const HopperConfig& config) {
  const ChainGeometry& g = config.conversion.geometry;
  std::mt19937_64 rng(3);
  double worst = 0.0, foot_vel = 0.0;
  for (int n = 0; n < 1000; ++n) {
    SerialJointState s;
    s.q = SampleSerial(rng, g, config.conversion.serial_limits);
    s.qd = Vec3(Uniform(rng, -3, 3), Uniform(rng, -3, 3), Uniform(rng, -1, 1));
    ParallelJointState p = SerialToParallelState(g, s);
    JointTorques tp{Vec3(Uniform(rng, -12, 12), Uniform(rng, -12, 12),
                         Uniform(rng, -12, 12)),
                    TorqueFrame::kParallel};
    JointTorques ts = ParallelToSerialTorque(g, tp, s);
    double power_p = tp.tau.dot(p.qd);
    double power_s = ts.tau.dot(s.qd);
    worst = std::max(worst,
                     std::abs(power_s - power_p) / (std::abs(power_p) + 1e-12));
    // matched rates move the foot identically (checked against a difference
    // quotient of the serial FK)
    double h = 1e-7;
    Vec3 v_fd = (ForwardKinematicsSerial(s.q + h * s.qd).x -
                 ForwardKinematicsSerial(s.q - h * s.qd).x) / (2 * h);
    Vec3 v_p = JacobianParallel(g, p.q) * p.qd;
    foot_vel = std::max(foot_vel, (v_fd - v_p).norm() / v_fd.norm());
  }
  Report("virtual_work",
         worst < 1e-10 && foot_vel < 1e-6,
         Fmt("max power mismatch=%.3g (<1e-10) foot velocity agreement=%.3g "
             "n=1000",
             worst, foot_vel));
}

void Ballistic(const HopperConfig& config) {
  ResetResult reset =
      Reset(config.conversion, config.sim, Terrain::Flat(), 0);
  SimState state = reset.state;
  state.body.pos = Vec3(0.1, -0.2, 2.0);
  state.body.lin_vel = Vec3(0.4, -0.3, 1.2);
  const Vec3 p0 = state.body.pos, v0 = state.body.lin_vel;
  Terrain terrain = Terrain::Flat();
  SimContext ctx{&config.conversion, &config.sim, &terrain, reset.params};
  const double dt = config.sim.dt;
  const int steps = static_cast<int>(std::lround(0.3 / dt));
  double worst = 0.0;
  bool contact = false;
  for (int k = 1; k <= steps; ++k) {
    state = Step(state, JointTorques{Vec3::Zero(), TorqueFrame::kSerial}, ctx);
    contact |= state.contact.in_contact;
    double t = k * dt;
    Vec3 exact = p0 + v0 * t - Vec3(0, 0, 0.5 * config.sim.gravity * t * t);
    worst = std::max(worst, (state.body.pos - exact).norm());
  }
  Report("ballistic", worst < 1e-4 && !contact,
         Fmt("max |p-p_exact|=%.3g m (<1e-4) over 0.3 s dt=%g", worst, dt));
}

EpisodeSpec HoppingSpec(std::uint64_t seed) {
  EpisodeSpec spec;
  spec.options.seed = seed;
  spec.options.randomize = true;
  spec.options.command.period = 0.4;
  spec.duration = 10.0;
  return spec;
}

struct HopStats {
  int longest_run = 0;
  int touchdowns = 0;
  double drift = 0.0;
  double worst_lag = 0.0;
};

// Touchdowns are counted in phase when they land within 0.3 T of a scheduled
// stance onset (k T). A run breaks on an out-of-phase touchdown or a skipped
// period.
HopStats AnalyzeHops(const EpisodeResult& r, double period) {
  HopStats s;
  Vec3 start = r.rows.front().state.body.pos;
  bool prev = r.rows.front().state.contact.in_contact;
  long last_k = -10;
  int run = 0;
  for (const PhysicsRow& row : r.rows) {
    s.drift = std::max(s.drift, (row.state.body.pos - start).head<2>().norm());
    bool c = row.state.contact.in_contact;
    if (c && !prev) {
      ++s.touchdowns;
      double t = row.state.time;
      long k = std::lround(t / period);
      double lag = t - k * period;
      s.worst_lag = std::max(s.worst_lag, std::abs(lag));
      if (std::abs(lag) <= 0.3 * period) {
        run = (k == last_k + 1) ? run + 1 : 1;
        last_k = k;
      } else {
        run = 0;
        last_k = -10;
      }
      s.longest_run = std::max(s.longest_run, run);
    }
    prev = c;
  }
  return s;
}

void BaselineHopping(const HopperConfig& config) {
  bool pass = true;
  std::string detail;
  for (int seed = 0; seed < kSeeds; ++seed) {
    EpisodeSpec spec = HoppingSpec(seed);
    EpisodeResult r = RunEpisode(config, spec);
    HopStats s = AnalyzeHops(r, spec.options.command.period);
    bool ok = r.metrics.termination == "completed" && s.longest_run >= 20 &&
              s.drift < 0.5;
    pass &= ok;
    detail += Fmt("[seed %d: run=%d/%d lag<=%.3fs drift=%.3fm %s] ", seed,
                  s.longest_run, s.touchdowns, s.worst_lag, s.drift,
                  r.metrics.termination.c_str());
  }
  Report("baseline_hopping", pass,
         detail + "(need run>=20 within 0.3T, drift<0.5 m, 10 s, all seeds)");
}

// Recovery time: last instant after the kick at which the horizontal body
// velocity is 0.1 m/s or more away from the command.
void PerturbationRecovery(const HopperConfig& config) {
  const double kick_time = 5.7;
  const Vec2 v_d(0.2, 0.0);
  int recovered = 0;
  std::string detail;
  for (int seed = 0; seed < kSeeds; ++seed) {
    EpisodeSpec spec = HoppingSpec(seed);
    spec.options.command.velocity = v_d;
    spec.perturbations.push_back({kick_time, Vec3(0.0, 0.4, 0.0)});
    EpisodeResult r = RunEpisode(config, spec);
    double last_bad = kick_time;
    double peak = 0.0;
    for (const PhysicsRow& row : r.rows) {
      double t = row.state.time;
      if (t <= kick_time) continue;
      double err = (row.state.body.lin_vel.head<2>() - v_d).norm();
      peak = std::max(peak, err);
      if (err >= 0.1) last_bad = t;
    }
    double recovery = last_bad - kick_time;
    bool ok = r.metrics.termination == "completed" && recovery <= 2.5 &&
              peak >= 0.3;  // the kick did register
    recovered += ok;
    detail += Fmt("[seed %d: %.2fs peak|v-vd|=%.2f %s] ", seed, recovery,
                  peak, r.metrics.termination.c_str());
  }
  Report("perturbation_recovery", recovered >= 4,
         detail + Fmt("recovered %d/5 (need >=4 within 2.5 s)", recovered));
}

void ConversionDistinction(const HopperConfig& config) {
  const ConversionConfig& conv = config.conversion;
  EpisodeSpec spec = HoppingSpec(0);
  spec.options.command.velocity = Vec2(0.2, 0.1);
  spec.perturbations.push_back({3.0, Vec3(0.0, 0.3, 0.0)});
  EpisodeResult r = RunEpisode(config, spec);
  int asymmetric = 0, distinct = 0;
  for (std::size_t i = 0; i < r.rows.size(); i += 5) {
    const PhysicsRow& row = r.rows[i];
    const Vec3& q = row.parallel.q;
    if (q.maxCoeff() - q.minCoeff() < 1e-2) continue;  // near-symmetric
    ++asymmetric;
    Vec3 a = Actuate(conv, ConversionMode::kTorqueMapping, row.action,
                     row.state.leg).serial_torque.tau;
    Vec3 b = Actuate(conv, ConversionMode::kJointTargetMapping, row.action,
                     row.state.leg).serial_torque.tau;
    bool differs = false;
    for (int j = 0; j < 3; ++j) {
      double scale = std::max(std::abs(a[j]), std::abs(b[j]));
      if (scale > 0.0 && std::abs(a[j] - b[j]) > 0.01 * scale) differs = true;
    }
    distinct += differs;
  }
  double fraction = asymmetric ? static_cast<double>(distinct) / asymmetric : 0;
  Report("conversion_distinction", asymmetric >= 100 && fraction >= 0.9,
         Fmt("%d/%d asymmetric poses differ by >1%% (%.1f%%, need >=90%%)",
             distinct, asymmetric, 100.0 * fraction));
}

// Child process speaking the rollout protocol on its stdin/stdout.
class ServerProcess {
 public:
  explicit ServerProcess(const std::string& exe) {
    int in[2], out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw std::runtime_error("pipe");
    pid_ = fork();
    if (pid_ == 0) {
      dup2(in[0], 0);
      dup2(out[1], 1);
      close(in[1]);
      close(out[0]);
      int devnull = open("/dev/null", O_WRONLY);
      dup2(devnull, 2);
      execl(exe.c_str(), exe.c_str(), "serve", "--stdio", (char*)nullptr);
      _exit(127);
    }
    close(in[0]);
    close(out[1]);
    to_ = fdopen(in[1], "w");
    from_ = fdopen(out[0], "r");
  }
  ~ServerProcess() {
    fclose(to_);
    fclose(from_);
    int status;
    waitpid(pid_, &status, 0);
  }
  std::string Call(const std::string& line) {
    std::fputs((line + "\n").c_str(), to_);
    std::fflush(to_);
    std::string reply;
    int ch;
    while ((ch = std::fgetc(from_)) != EOF && ch != '\n') reply.push_back(ch);
    return reply;
  }

 private:
  pid_t pid_;
  FILE* to_;
  FILE* from_;
};

void Determinism(const HopperConfig& config, const std::string& cli) {
  EpisodeSpec spec = HoppingSpec(11);
  spec.duration = 4.0;
  spec.options.command.velocity = Vec2(0.1, -0.1);
  spec.perturbations.push_back({2.0, Vec3(0.3, 0.2, 0.0)});
  auto text = [&](const EpisodeSpec& sp, const EpisodeResult& res) {
    std::ostringstream out;
    WriteLog(out, sp, res);
    return out.str();
  };
  EpisodeResult first = RunEpisode(config, spec);
  std::string log = text(spec, first);
  std::istringstream in(log);
  LoadedLog loaded = ReadLog(in);
  std::string replay =
      text(loaded.spec, ReplayEpisode(config, loaded.spec, loaded.actions));
  std::string rerun = text(spec, RunEpisode(config, spec));
  bool logs_ok = replay == log && rerun == log;

  // Servers replay the controller's action stream from a matching episode.
  using nlohmann::json;
  EpisodeSpec served = HoppingSpec(5);
  served.duration = 5.0;
  served.options.command.velocity = Vec2(0.2, 0.0);
  served.perturbations.push_back({1.0, Vec3(0.0, 0.4, 0.0)});
  EpisodeResult reference = RunEpisode(config, served);
  ServerProcess a(cli), b(cli);
  std::vector<std::string> requests = {
      json{{"type", "hello"}, {"version", kProtocolVersion}}.dump(),
      json{{"type", "reset"},
           {"seed", 5},
           {"randomize", true},
           {"command", {{"vx", 0.2}, {"vy", 0.0}, {"period", 0.4}}},
           {"perturbations", json::array({{{"t", 1.0}, {"dv", {0, 0.4, 0}}}})}}
          .dump()};
  for (const Vec3& act : reference.actions) {
    requests.push_back(
        json{{"type", "step"}, {"action", {act.x(), act.y(), act.z()}}}.dump());
  }
  int transitions = 0, mismatches = 0, diverged = 0;
  for (const std::string& req : requests) {
    std::string ra = a.Call(req), rb = b.Call(req);
    if (ra != rb || ra.empty()) ++mismatches;
    json t = json::parse(ra, nullptr, false);
    if (t.is_object() && t.value("type", "") == "transition") {
      // served rewards follow the in-process episode bit for bit
      std::size_t row = (transitions + 1) * config.sim.control_decimation - 1;
      if (row >= reference.rows.size() ||
          t["reward"].get<double>() != reference.rows[row].reward) {
        ++diverged;
      }
      ++transitions;
    }
    if (ra.find("\"done\":true") != std::string::npos) break;
  }
  bool matches_episode =
      diverged == 0 &&
      transitions == static_cast<int>(reference.actions.size());
  a.Call(R"({"type":"close"})");
  b.Call(R"({"type":"close"})");
  Report("determinism", logs_ok && mismatches == 0 && matches_episode,
         Fmt("replay log %s, rerun log %s (%zu rows), servers %d/%d "
             "transitions identical, %d differ from in-process run",
             replay == log ? "identical" : "DIFFERS",
             rerun == log ? "identical" : "DIFFERS", first.rows.size(),
             transitions - mismatches, transitions, diverged));
}

}  // namespace
}  // namespace hopper

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "hopper";
  hopper::HopperConfig config;
  auto start = hopper::Clock::now();
  hopper::KinematicsRoundtrip(config);
  hopper::Jacobians(config);
  hopper::VirtualWork(config);
  hopper::Ballistic(config);
  hopper::BaselineHopping(config);
  hopper::PerturbationRecovery(config);
  hopper::ConversionDistinction(config);
  hopper::Determinism(config, cli);
  std::printf("%d criteria failed, %.2f s\n", hopper::g_failures,
              hopper::Seconds(start));
  return hopper::g_failures == 0 ? 0 : 1;
}
