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

#include "activetrack/bridge.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <sstream>
#include <thread>

#include "activetrack/errors.h"

namespace activetrack {

using nlohmann::json;

ScriptedPolicy::ScriptedPolicy(std::vector<AgentCommand> actions, int t_a)
    : actions_(std::move(actions)), t_a_(t_a) {
  if (actions_.empty()) throw InvalidConfig("scripted policy needs actions");
  if (t_a_ < 1) throw InvalidConfig("T_a must be >= 1");
}

std::vector<AgentCommand> ScriptedPolicy::Reply(
    const std::vector<AgentCommand>& actions, int t, int t_a) {
  std::vector<AgentCommand> out;
  out.reserve(t_a);
  const auto n = static_cast<long long>(actions.size());
  for (int k = 0; k < t_a; ++k) {
    out.push_back(actions[static_cast<std::size_t>((t + k) % n)]);
  }
  return out;
}

std::vector<AgentCommand> ScriptedPolicy::Query(
    int t, const std::vector<StepRecord>& /*observations*/) {
  return Reply(actions_, t, t_a_);
}

std::vector<AgentCommand> ParseActionList(const std::string& text) {
  std::vector<AgentCommand> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) {
      throw InvalidConfig("action '" + item + "' is not v,omega");
    }
    try {
      const double v = std::stod(item.substr(0, comma));
      const double w = std::stod(item.substr(comma + 1));
      out.push_back({v, w});
    } catch (const std::logic_error&) {
      throw InvalidConfig("action '" + item + "' is not numeric");
    }
  }
  if (out.empty()) throw InvalidConfig("empty action list");
  return out;
}

namespace {

const char* KindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kHello: return "hello";
    case MessageKind::kObs: return "obs";
    case MessageKind::kAction: return "action";
    case MessageKind::kBye: return "bye";
    case MessageKind::kError: return "error";
  }
  return "?";
}

}  // namespace

std::string EncodeMessage(const BridgeMessage& m) {
  json j{{"kind", KindName(m.kind)}};
  switch (m.kind) {
    case MessageKind::kHello:
      j["version"] = m.version;
      j["name"] = m.name;
      break;
    case MessageKind::kObs: {
      json obs = json::array();
      for (const StepRecord& s : m.observations) {
        json o = StepToJson(s);
        o.erase("action");
        obs.push_back(std::move(o));
      }
      j["t"] = m.t;
      j["observations"] = std::move(obs);
      break;
    }
    case MessageKind::kAction: {
      json actions = json::array();
      for (const AgentCommand& a : m.actions) actions.push_back({a.v, a.omega});
      j["t"] = m.t;
      j["actions"] = std::move(actions);
      break;
    }
    case MessageKind::kBye:
      break;
    case MessageKind::kError:
      j["message"] = m.message;
      break;
  }
  return j.dump();
}

BridgeMessage DecodeMessage(const std::string& line, int ego_size) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw BridgeProtocolError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw BridgeProtocolError("message without a kind");
  }
  const std::string kind = j["kind"];
  BridgeMessage m;
  try {
    if (kind == "hello") {
      m.kind = MessageKind::kHello;
      m.version = j.at("version").get<int>();
      m.name = j.value("name", std::string());
    } else if (kind == "obs") {
      m.kind = MessageKind::kObs;
      m.t = j.at("t").get<int>();
      const json& obs = j.at("observations");
      if (!obs.is_array()) throw BridgeProtocolError("observations not a list");
      for (const json& o : obs) {
        m.observations.push_back(StepFromJson(o, ego_size, "observation"));
      }
    } else if (kind == "action") {
      m.kind = MessageKind::kAction;
      m.t = j.at("t").get<int>();
      const json& actions = j.at("actions");
      if (!actions.is_array()) throw BridgeProtocolError("actions not a list");
      for (const json& a : actions) {
        if (!a.is_array() || a.size() != 2) {
          throw BridgeProtocolError("action entries must be [v, omega]");
        }
        m.actions.push_back({a[0].get<double>(), a[1].get<double>()});
      }
    } else if (kind == "bye") {
      m.kind = MessageKind::kBye;
    } else if (kind == "error") {
      m.kind = MessageKind::kError;
      m.message = j.value("message", std::string());
    } else {
      throw BridgeProtocolError("unknown message kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw BridgeProtocolError("malformed " + kind + " message: " + e.what());
  } catch (const MalformedEpisode& e) {
    throw BridgeProtocolError(std::string("malformed observation: ") +
                              e.what());
  }
  return m;
}

namespace {

void IgnoreSigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

}  // namespace

BridgePolicy::BridgePolicy(const std::string& command, Options options)
    : options_(options) {
  IgnoreSigpipe();
  int in_pipe[2];   // harness -> child
  int out_pipe[2];  // child -> harness
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) {
    throw BridgeProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BridgeProtocolError(std::string("pipe: ") + std::strerror(errno));
  }
  const std::string shell_command = "exec " + command;
  pid_ = ::fork();
  if (pid_ < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) {
      ::close(fd);
    }
    throw BridgeProtocolError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", shell_command.c_str(),
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];

  try {
    const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
    const auto line = ReadLine(deadline);
    if (!line) throw BridgeTimeout("no hello from '" + command + "'");
    const BridgeMessage hello = DecodeMessage(*line, options_.ego_size);
    if (hello.kind != MessageKind::kHello) {
      throw BridgeProtocolError(std::string("expected hello, got ") +
                                KindName(hello.kind));
    }
    if (hello.version != kBridgeProtocolVersion) {
      throw BridgeProtocolError("peer speaks protocol version " +
                                std::to_string(hello.version));
    }
    name_ = hello.name.empty() ? command : hello.name;
  } catch (...) {
    Shutdown();
    throw;
  }
}

BridgePolicy::~BridgePolicy() { Shutdown(); }

void BridgePolicy::Send(const BridgeMessage& message) {
  std::string line = EncodeMessage(message);
  line += '\n';
  std::size_t done = 0;
  while (done < line.size()) {
    const ssize_t n = ::write(to_child_, line.data() + done, line.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeProtocolError(std::string("write to peer failed: ") +
                                std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> BridgePolicy::ReadLine(
    std::chrono::steady_clock::time_point deadline) {
  while (true) {
    const auto newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw BridgeProtocolError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) return std::nullopt;
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw BridgeProtocolError(std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) throw BridgeProtocolError("peer closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<AgentCommand> BridgePolicy::Query(
    int t, const std::vector<StepRecord>& observations) {
  if (static_cast<int>(observations.size()) != options_.t_o) {
    throw BridgeProtocolError("obs needs exactly T_o observations");
  }
  BridgeMessage obs;
  obs.kind = MessageKind::kObs;
  obs.t = t;
  obs.observations = observations;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    Send(obs);
    const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
    while (auto line = ReadLine(deadline)) {
      const BridgeMessage reply = DecodeMessage(*line, options_.ego_size);
      switch (reply.kind) {
        case MessageKind::kAction:
          if (reply.t < t) continue;  // late answer to an earlier request
          if (reply.t > t) {
            throw BridgeProtocolError("action for t=" +
                                      std::to_string(reply.t) +
                                      " answers obs t=" + std::to_string(t));
          }
          if (static_cast<int>(reply.actions.size()) != options_.t_a) {
            throw BridgeProtocolError(
                "action carries " + std::to_string(reply.actions.size()) +
                " pairs, expected " + std::to_string(options_.t_a));
          }
          return reply.actions;
        case MessageKind::kError:
          throw BridgeProtocolError("peer error: " + reply.message);
        default:
          throw BridgeProtocolError(std::string("unexpected ") +
                                    KindName(reply.kind) + " message");
      }
    }
  }
  throw BridgeTimeout("no action for t=" + std::to_string(t) + " after " +
                      std::to_string(options_.retries + 1) + " attempts");
}

void BridgePolicy::Shutdown() {
  if (to_child_ >= 0) {
    try {
      BridgeMessage bye;
      bye.kind = MessageKind::kBye;
      Send(bye);
    } catch (const Error&) {
    }
    ::close(to_child_);
    to_child_ = -1;
  }
  if (pid_ > 0) {
    int status = 0;
    bool exited = false;
    for (int i = 0; i < 50 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!exited) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  if (from_child_ >= 0) {
    ::close(from_child_);
    from_child_ = -1;
  }
}

}  // namespace activetrack
