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

// Newline-delimited JSON rollout protocol, one environment per connection.

#ifndef HOPPER_PROTOCOL_H_
#define HOPPER_PROTOCOL_H_

#include <string>

#include <json.hpp>

#include "hopper/config.h"
#include "hopper/environment.h"

namespace hopper {

inline constexpr int kProtocolVersion = 1;

struct Reply {
  std::string line;    // response, without the trailing newline
  bool close = false;  // connection must be closed after sending
};

// Transport-independent request handler.
class ProtocolSession {
 public:
  explicit ProtocolSession(const HopperConfig& config);
  Reply Handle(const std::string& request);
  bool closed() const { return closed_; }

 private:
  Reply HandleHello(const nlohmann::json& request);
  Reply HandleReset(const nlohmann::json& request);
  Reply HandleStep(const nlohmann::json& request);

  HopperConfig config_;
  Environment env_;
  bool greeted_ = false;
  bool closed_ = false;
};

// Serves one session over a pair of file descriptors. Returns when the
// client closes, sends close, breaks the protocol version, or stays silent
// longer than the configured timeout.
enum class ServeEnd { kClosed, kEof, kTimeout, kVersionMismatch, kIoError };
ServeEnd ServeFd(const HopperConfig& config, int in_fd, int out_fd);

// Listens on 127.0.0.1:port (0 picks a free port), reports the bound port
// through `on_listen`, then serves a single connection.
ServeEnd ServeTcp(const HopperConfig& config, int port,
                  void (*on_listen)(int port) = nullptr);

const char* ServeEndName(ServeEnd end);

}  // namespace hopper

#endif  // HOPPER_PROTOCOL_H_
