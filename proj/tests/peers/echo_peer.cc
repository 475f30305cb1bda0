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

// Bridge peer for tests. In echo mode it answers every obs with the same
// actions ScriptedPolicy would produce; the other modes misbehave on purpose.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "activetrack/bridge.h"
#include "activetrack/errors.h"

namespace {

using activetrack::BridgeMessage;
using activetrack::MessageKind;

void Emit(const std::string& line) {
  std::cout << line << '\n' << std::flush;
}

void Emit(const BridgeMessage& m) { Emit(activetrack::EncodeMessage(m)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bridge test peer"};
  std::string mode = "echo";
  std::string actions_text = "0.5,0.1";
  int t_a = 16;
  int t_o = 2;
  int ego_size = activetrack::kDefaultEgoSize;
  std::string log_path;
  app.add_option("--mode", mode,
                 "echo | no-hello | silent | bad-kind | wrong-count | "
                 "drop-first | stale-first | extra-fields | error | "
                 "future | bad-version");
  app.add_option("--actions", actions_text);
  app.add_option("--t-a", t_a);
  app.add_option("--t-o", t_o);
  app.add_option("--ego-size", ego_size);
  app.add_option("--log", log_path, "append one line per obs: t count");
  CLI11_PARSE(app, argc, argv);

  const auto actions = activetrack::ParseActionList(actions_text);

  if (mode != "no-hello") {
    BridgeMessage hello;
    hello.kind = MessageKind::kHello;
    hello.name = "echo-peer";
    if (mode == "bad-version") hello.version = 99;
    Emit(hello);
  }

  int obs_seen = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    BridgeMessage in;
    try {
      in = activetrack::DecodeMessage(line, ego_size);
    } catch (const activetrack::Error& e) {
      BridgeMessage err;
      err.kind = MessageKind::kError;
      err.message = e.what();
      Emit(err);
      return 1;
    }
    if (in.kind == MessageKind::kBye) return 0;
    if (in.kind != MessageKind::kObs) continue;
    ++obs_seen;
    if (!log_path.empty()) {
      if (std::FILE* f = std::fopen(log_path.c_str(), "a")) {
        std::fprintf(f, "%d %zu\n", in.t, in.observations.size());
        std::fclose(f);
      }
    }
    if (static_cast<int>(in.observations.size()) != t_o) {
      BridgeMessage err;
      err.kind = MessageKind::kError;
      err.message = "expected " + std::to_string(t_o) + " observations";
      Emit(err);
      continue;
    }

    BridgeMessage reply;
    reply.kind = MessageKind::kAction;
    reply.t = in.t;
    reply.actions = activetrack::ScriptedPolicy::Reply(actions, in.t, t_a);

    if (mode == "silent" || mode == "no-hello") continue;
    if (mode == "drop-first" && obs_seen == 1) continue;
    if (mode == "bad-kind") {
      Emit(R"({"kind":"telemetry","t":0})");
      continue;
    }
    if (mode == "wrong-count") reply.actions.pop_back();
    if (mode == "error") {
      BridgeMessage err;
      err.kind = MessageKind::kError;
      err.message = "policy crashed";
      Emit(err);
      continue;
    }
    if (mode == "future") reply.t = in.t + 1;
    if (mode == "stale-first" && obs_seen == 1) {
      BridgeMessage stale = reply;
      stale.t = in.t - 1;
      stale.actions.assign(static_cast<std::size_t>(t_a), {9.0, 9.0});
      Emit(stale);
    }
    if (mode == "extra-fields") {
      nlohmann::json j = nlohmann::json::parse(activetrack::EncodeMessage(reply));
      j["debug"] = {{"latency_ms", 3}};
      j["note"] = "ignored";
      Emit(j.dump());
      continue;
    }
    Emit(reply);
  }
  return 0;
}
