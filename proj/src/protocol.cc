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

#include "hopper/protocol.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>

#include "hopper/error.h"

namespace hopper {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxLine = 1 << 20;

Reply ErrorReply(const std::string& code, const std::string& message,
                 bool close = false) {
  json j = {{"type", "error"}, {"code", code}, {"message", message}};
  return {j.dump(), close};
}

json ToJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json ToJson(const Observation& obs) {
  return json(std::vector<double>(obs.values.begin(), obs.values.end()));
}

json ToJson(const PrivilegedState& p) {
  return {{"base_lin_vel", ToJson(p.base_lin_vel)},
          {"contact", p.contact},
          {"params",
           {{"body_mass", p.params.body_mass},
            {"friction", p.params.contact.friction},
            {"contact_stiffness", p.params.contact.stiffness},
            {"gain_scale", p.params.gain_scale}}}};
}

json ToJson(const RewardTerms& r) {
  return {{"tracking", r.tracking},
          {"phase", r.phase},
          {"attitude", r.attitude},
          {"action_rate", r.action_rate},
          {"torque", r.torque}};
}

// Reads an optional field, throwing json::type_error on a type mismatch.
template <typename T>
T Field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->template get<T>();
}

}  // namespace

ProtocolSession::ProtocolSession(const HopperConfig& config)
    : config_(config), env_(config) {}

Reply ProtocolSession::Handle(const std::string& text) {
  if (closed_) return ErrorReply("closed", "session is closed", true);
  json request;
  try {
    request = json::parse(text);
  } catch (const json::parse_error& e) {
    return ErrorReply("malformed", e.what());
  }
  if (!request.is_object() || !request.contains("type") ||
      !request["type"].is_string()) {
    return ErrorReply("malformed", "request must be an object with a type");
  }
  const std::string type = request["type"];
  try {
    if (type == "hello") return HandleHello(request);
    if (!greeted_) return ErrorReply("hello_required", "send hello first");
    if (type == "reset") return HandleReset(request);
    if (type == "step") return HandleStep(request);
    if (type == "close") {
      closed_ = true;
      return {json{{"type", "ready"}, {"status", "closed"}}.dump(), true};
    }
    return ErrorReply("malformed", "unknown request type " + type);
  } catch (const json::exception& e) {
    return ErrorReply("malformed", e.what());
  }
}

Reply ProtocolSession::HandleHello(const json& request) {
  int version = request.at("version").get<int>();
  if (version != kProtocolVersion) {
    closed_ = true;
    return ErrorReply("version_mismatch",
                      "server speaks version " +
                          std::to_string(kProtocolVersion),
                      true);
  }
  greeted_ = true;
  json reply = {{"type", "ready"},
                {"version", kProtocolVersion},
                {"obs_size", Observation::kSize},
                {"action_size", 3},
                {"control_period", config_.sim.control_period()}};
  return {reply.dump(), false};
}

Reply ProtocolSession::HandleReset(const json& request) {
  EpisodeOptions options;
  options.seed = Field<std::uint64_t>(request, "seed", 0);
  std::vector<Perturbation> perturbations;
  try {
    options.terrain =
        Terrain::Parse(Field<std::string>(request, "terrain", "flat"));
    if (auto it = request.find("command"); it != request.end()) {
      options.command.velocity = Vec2(Field<double>(*it, "vx", 0.0),
                                      Field<double>(*it, "vy", 0.0));
      options.command.period = Field<double>(*it, "period", 0.4);
    }
    std::string mode = Field<std::string>(request, "conversion", "torque");
    if (mode == "torque") {
      options.mode = ConversionMode::kTorqueMapping;
    } else if (mode == "joint-target") {
      options.mode = ConversionMode::kJointTargetMapping;
    } else {
      return ErrorReply("invalid_argument", "unknown conversion " + mode);
    }
    options.randomize = Field<bool>(request, "randomize",
                                    config_.sim.randomization.enabled);
    if (auto it = request.find("perturbations"); it != request.end()) {
      for (const json& p : *it) {
        auto dv = p.at("dv").get<std::vector<double>>();
        if (dv.size() != 3) {
          return ErrorReply("invalid_argument", "dv must have 3 entries");
        }
        perturbations.push_back(
            {p.at("t").get<double>(), Vec3(dv[0], dv[1], dv[2])});
      }
    }
    Observation obs = env_.Reset(options);
    env_.SetPerturbations(perturbations);
    PrivilegedState privileged;
    privileged.base_lin_vel = env_.state().body.lin_vel;
    privileged.contact = env_.state().contact.in_contact;
    privileged.params = env_.params();
    json reply = {{"type", "obs"},
                  {"obs", ToJson(obs)},
                  {"privileged", ToJson(privileged)}};
    return {reply.dump(), false};
  } catch (const Error& e) {
    return ErrorReply("invalid_argument", e.what());
  }
}

Reply ProtocolSession::HandleStep(const json& request) {
  auto it = request.find("action");
  if (it == request.end() || !it->is_array() || it->size() != 3) {
    return ErrorReply("bad_action_shape", "action must be an array of 3");
  }
  Vec3 action;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) {
      return ErrorReply("bad_action_shape", "action entries must be numbers");
    }
    action[i] = (*it)[i].get<double>();
  }
  if (!env_.running()) {
    return ErrorReply("not_reset", "reset before stepping");
  }
  if (!action.allFinite()) {
    return ErrorReply("invalid_argument", "action must be finite");
  }
  Transition t = env_.Step(action);
  json reply = {{"type", "transition"},
                {"obs", ToJson(t.obs)},
                {"reward", t.reward.total()},
                {"reward_terms", ToJson(t.reward)},
                {"done", t.done},
                {"reason", t.reason},
                {"time", env_.state().time},
                {"privileged", ToJson(t.privileged)}};
  return {reply.dump(), false};
}

const char* ServeEndName(ServeEnd end) {
  switch (end) {
    case ServeEnd::kClosed:
      return "closed";
    case ServeEnd::kEof:
      return "eof";
    case ServeEnd::kTimeout:
      return "timeout";
    case ServeEnd::kVersionMismatch:
      return "version_mismatch";
    case ServeEnd::kIoError:
      return "io_error";
  }
  return "unknown";
}

namespace {

bool WriteAll(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::write(fd, data.data() + sent, data.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

// Waits up to `timeout` seconds for input on fd. 1 ready, 0 timeout, -1 error.
int WaitReadable(int fd, double timeout) {
  pollfd p{fd, POLLIN, 0};
  int ms = static_cast<int>(std::ceil(timeout * 1000.0));
  for (;;) {
    int r = ::poll(&p, 1, ms);
    if (r < 0 && errno == EINTR) continue;
    return r < 0 ? -1 : (r == 0 ? 0 : 1);
  }
}

}  // namespace

ServeEnd ServeFd(const HopperConfig& config, int in_fd, int out_fd) {
  ProtocolSession session(config);
  std::string buffer;
  char chunk[4096];
  for (;;) {
    std::size_t newline;
    while ((newline = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, newline);
      buffer.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      Reply reply = session.Handle(line);
      if (!WriteAll(out_fd, reply.line + "\n")) return ServeEnd::kIoError;
      if (reply.close) {
        return reply.line.find("version_mismatch") != std::string::npos
                   ? ServeEnd::kVersionMismatch
                   : ServeEnd::kClosed;
      }
    }
    if (buffer.size() > kMaxLine) {
      WriteAll(out_fd, ErrorReply("malformed", "request too long").line + "\n");
      buffer.clear();
    }
    int ready = WaitReadable(in_fd, config.server.timeout);
    if (ready == 0) return ServeEnd::kTimeout;
    if (ready < 0) return ServeEnd::kIoError;
    ssize_t n = ::read(in_fd, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) return ServeEnd::kIoError;
    if (n == 0) return ServeEnd::kEof;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

ServeEnd ServeTcp(const HopperConfig& config, int port,
                  void (*on_listen)(int port)) {
  int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw Error(ErrorCode::kIo, "socket failed");
  int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listener, 1) < 0) {
    ::close(listener);
    throw Error(ErrorCode::kIo, "cannot listen on port " + std::to_string(port));
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listen) on_listen(ntohs(addr.sin_port));

  int ready = WaitReadable(listener, config.server.timeout);
  if (ready <= 0) {
    ::close(listener);
    return ready == 0 ? ServeEnd::kTimeout : ServeEnd::kIoError;
  }
  int conn = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (conn < 0) return ServeEnd::kIoError;
  ServeEnd end = ServeFd(config, conn, conn);
  ::close(conn);
  return end;
}

}  // namespace hopper
