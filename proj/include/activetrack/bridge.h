// Copyright 2026 The activetrack Authors
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

#ifndef ACTIVETRACK_BRIDGE_H_
#define ACTIVETRACK_BRIDGE_H_

#include <chrono>
#include <optional>
#include <string>
#include <sys/types.h>
#include <vector>

#include <json.hpp>

#include "activetrack/dataset.h"
#include "activetrack/world.h"

namespace activetrack {

inline constexpr int kBridgeProtocolVersion = 1;

// Source of action sequences for the receding-horizon loop. Query receives
// exactly T_o observations ending at step t and returns exactly T_a actions.
class ActionSource {
 public:
  virtual ~ActionSource() = default;
  virtual std::string name() const = 0;
  virtual std::vector<AgentCommand> Query(
      int t, const std::vector<StepRecord>& observations) = 0;
};

// In-process policy replaying a cyclic action list: the reply at step t is
// actions[(t + k) mod n] for k in [0, T_a).
class ScriptedPolicy final : public ActionSource {
 public:
  ScriptedPolicy(std::vector<AgentCommand> actions, int t_a);
  std::string name() const override { return "scripted"; }
  std::vector<AgentCommand> Query(
      int t, const std::vector<StepRecord>& observations) override;

  // Same rule as Query, exposed for peers and tests.
  static std::vector<AgentCommand> Reply(
      const std::vector<AgentCommand>& actions, int t, int t_a);

 private:
  std::vector<AgentCommand> actions_;
  int t_a_;
};

// "v,w;v,w;..." to commands. Throws InvalidConfig.
std::vector<AgentCommand> ParseActionList(const std::string& text);

enum class MessageKind { kHello, kObs, kAction, kBye, kError };

struct BridgeMessage {
  MessageKind kind = MessageKind::kBye;
  int version = kBridgeProtocolVersion;  // hello
  std::string name;                      // hello
  int t = 0;                             // obs, action
  std::vector<StepRecord> observations;  // obs
  std::vector<AgentCommand> actions;     // action
  std::string message;                   // error
};

// One protocol line, without the trailing newline.
std::string EncodeMessage(const BridgeMessage& message);
// Unknown fields are ignored. Throws BridgeProtocolError on invalid JSON, a
// missing or unknown kind, or malformed payloads.
BridgeMessage DecodeMessage(const std::string& line, int ego_size);

// Child process speaking the protocol over its standard input and output.
// The command runs under /bin/sh -c.
class BridgePolicy final : public ActionSource {
 public:
  struct Options {
    int t_o = 2;
    int t_a = 16;
    int ego_size = kDefaultEgoSize;
    std::chrono::milliseconds timeout{10000};
    // Attempts after the first before BridgeTimeout.
    int retries = 1;
  };

  // Spawns the child and waits for its hello. Throws BridgeTimeout,
  // BridgeProtocolError.
  BridgePolicy(const std::string& command, Options options);
  ~BridgePolicy() override;
  BridgePolicy(const BridgePolicy&) = delete;
  BridgePolicy& operator=(const BridgePolicy&) = delete;

  std::string name() const override { return name_; }
  std::vector<AgentCommand> Query(
      int t, const std::vector<StepRecord>& observations) override;

 private:
  void Send(const BridgeMessage& message);
  // Next complete line before the deadline, or nullopt on timeout.
  std::optional<std::string> ReadLine(
      std::chrono::steady_clock::time_point deadline);
  void Shutdown();

  Options options_;
  std::string name_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace activetrack

#endif  // ACTIVETRACK_BRIDGE_H_
