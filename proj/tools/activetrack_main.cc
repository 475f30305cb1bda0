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

// activetrack command line: simulate, gen-dataset, evaluate, replay,
// write-map.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "activetrack/dataset.h"
#include "activetrack/errors.h"
#include "activetrack/harness.h"
#include "activetrack/metrics.h"
#include "activetrack/replay.h"

namespace at = activetrack;
namespace fs = std::filesystem;

namespace {

// Episode knobs shared by the simulating subcommands.
void AddEpisodeOptions(CLI::App* cmd, at::EpisodeConfig& c) {
  cmd->add_option("--map", c.map_path, "PGM map or builtin:house")
      ->capture_default_str();
  cmd->add_option("--steps", c.sim.episode_length, "steps per episode")
      ->capture_default_str();
  cmd->add_option("--n-y", c.n_y, "targets per episode, 0 draws from [3, 6]")
      ->capture_default_str();
  cmd->add_option("--sigma-threshold", c.sigma_threshold,
                  "log det threshold of the uncertainty expert");
  cmd->add_option("--track-duration", c.track_duration)->capture_default_str();
  cmd->add_option("--replan-interval", c.replan_interval)->capture_default_str();
  cmd->add_option("--t-o", c.t_o, "observation context length")
      ->capture_default_str();
  cmd->add_option("--t-a", c.t_a, "action sequence length")
      ->capture_default_str();
  cmd->add_option("--t-exec", c.t_exec, "actions executed per policy reply")
      ->capture_default_str();
  cmd->add_option("--ego-size", c.ego_size)->capture_default_str();
  cmd->add_option("--omega-gain", c.omega_gain,
                  "gain on external angular velocity commands")
      ->capture_default_str();
  cmd->add_option("--bridge-timeout", c.bridge_timeout_s, "seconds per request")
      ->capture_default_str();
  cmd->add_option("--dt", c.sim.dt)->capture_default_str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw at::InvalidConfig("cannot write " + path.string());
  out << text;
}

std::vector<std::uint64_t> ParseSeedRange(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) return {std::stoull(text)};
    const std::uint64_t a = std::stoull(text.substr(0, dots));
    const std::uint64_t b = std::stoull(text.substr(dots + 2));
    if (b < a) throw at::InvalidConfig("seed range '" + text + "' is empty");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
    return out;
  } catch (const std::logic_error&) {
    throw at::InvalidConfig("bad seed range '" + text + "'");
  }
}

std::vector<std::string> SplitList(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const std::string& item : items) {
    if (item.rfind("bridge:", 0) == 0 || item.rfind("scripted:", 0) == 0) {
      out.push_back(item);
      continue;
    }
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

nlohmann::json ConfigJson(const at::EpisodeConfig& c) {
  return {{"map_path", c.map_path},
          {"steps", c.sim.episode_length},
          {"dt", c.sim.dt},
          {"N_y", c.n_y},
          {"T_o", c.t_o},
          {"T_a", c.t_a},
          {"T_exec", c.t_exec},
          {"N_max", c.n_max},
          {"ego_size", c.ego_size},
          {"track_duration", c.track_duration},
          {"replan_interval", c.replan_interval}};
}

int Fail(const at::EpisodeResult& r) {
  std::cerr << "episode failed: " << r.failure << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active multi-target tracking workbench"};
  app.set_config("--config", "", "INI/TOML file mirroring the flags");
  app.require_subcommand(1);
  // lets --config follow the subcommand name
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  at::EpisodeConfig sim_config;
  std::uint64_t sim_seed = 0;
  std::string sim_out = "episode.jsonl";
  std::string sim_metrics;
  auto* simulate = app.add_subcommand("simulate", "run one seeded episode");
  AddEpisodeOptions(simulate, sim_config);
  simulate->add_option("--expert,--policy", sim_config.policy,
                       "frontier | uncertainty | time | bridge:<command>")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed)->capture_default_str();
  simulate->add_option("--out", sim_out, "episode file")->capture_default_str();
  simulate->add_option("--metrics", sim_metrics,
                       "metrics CSV (default: <out> with .csv)");

  at::EpisodeConfig gen_config;
  std::vector<std::string> gen_experts{"frontier", "uncertainty", "time"};
  int gen_episodes = 5;
  std::uint64_t gen_seed = 0;
  std::string gen_dir = "dataset";
  int gen_workers = 1;
  auto* gen = app.add_subcommand("gen-dataset", "record expert episodes");
  AddEpisodeOptions(gen, gen_config);
  gen->add_option("--experts", gen_experts, "comma separated expert names")
      ->capture_default_str();
  gen->add_option("--episodes-per-expert", gen_episodes)->capture_default_str();
  gen->add_option("--seed-base", gen_seed, "first seed")->capture_default_str();
  gen->add_option("--out-dir", gen_dir)->capture_default_str();
  gen->add_option("--workers", gen_workers)->capture_default_str();

  at::EpisodeConfig eval_config;
  std::vector<std::string> eval_policies{"frontier"};
  std::string eval_seeds = "0..4";
  std::string eval_out = "evaluation.csv";
  int eval_workers = 1;
  auto* evaluate = app.add_subcommand("evaluate", "episode-averaged metrics");
  AddEpisodeOptions(evaluate, eval_config);
  evaluate->add_option("--policy", eval_policies,
                       "expert names or bridge:<command>")
      ->capture_default_str();
  evaluate->add_option("--seeds", eval_seeds, "a..b inclusive")
      ->capture_default_str();
  evaluate->add_option("--out", eval_out, "summary CSV")->capture_default_str();
  evaluate->add_option("--workers", eval_workers)->capture_default_str();

  std::string replay_episode;
  std::string replay_dir = "replay";
  auto* replay = app.add_subcommand("replay", "plot a recorded episode");
  replay->add_option("--episode", replay_episode)->required();
  replay->add_option("--out-dir", replay_dir)->capture_default_str();

  std::string map_out = "maps/house.pgm";
  auto* write_map = app.add_subcommand("write-map", "export the built-in map");
  write_map->add_option("--out", map_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim_config.sim.seed = sim_seed;
      const at::OccupancyGrid map = at::LoadEpisodeMap(sim_config.map_path);
      const at::EpisodeResult r = at::RunEpisode(sim_config, map);
      if (!r.record.steps.empty()) at::WriteEpisode(r.record, sim_out);
      fs::path metrics = sim_metrics;
      if (metrics.empty()) metrics = fs::path(sim_out).replace_extension(".csv");
      WriteFile(metrics, at::MetricsCsv(r.metrics));
      if (r.failed) return Fail(r);
      std::printf("%zu steps -> %s, %s\n", r.metrics.size(), sim_out.c_str(),
                  metrics.c_str());
      return 0;
    }
    if (*gen) {
      const at::OccupancyGrid map = at::LoadEpisodeMap(gen_config.map_path);
      const std::vector<std::string> experts = SplitList(gen_experts);
      for (const std::string& e : experts) at::ParseExpert(e);
      fs::create_directories(gen_dir);
      std::vector<std::string> files;
      int index = 0;
      int failures = 0;
      for (const std::string& e : experts) {
        for (int k = 0; k < gen_episodes; ++k, ++index) {
          at::EpisodeConfig c = gen_config;
          c.policy = e;
          c.sim.seed = gen_seed + static_cast<std::uint64_t>(k);
          const at::EpisodeResult r = at::RunEpisode(c, map);
          char name[32];
          std::snprintf(name, sizeof(name), "episode_%05d.jsonl", index);
          if (r.failed) {
            ++failures;
            std::cerr << name << " (" << e << ", seed " << c.sim.seed
                      << ") failed: " << r.failure << "\n";
          }
          if (r.record.steps.empty()) continue;
          at::WriteEpisode(r.record, fs::path(gen_dir) / name);
          files.push_back(name);
        }
      }
      nlohmann::json config = ConfigJson(gen_config);
      config["experts"] = experts;
      config["episodes_per_expert"] = gen_episodes;
      config["seed_base"] = gen_seed;
      at::WriteManifest(gen_dir, files, config);
      std::printf("%zu episodes -> %s\n", files.size(), gen_dir.c_str());
      return failures == 0 ? 0 : 1;
    }
    if (*evaluate) {
      const at::OccupancyGrid map = at::LoadEpisodeMap(eval_config.map_path);
      std::vector<at::EpisodeConfig> configs;
      for (const std::string& p : SplitList(eval_policies)) {
        at::EpisodeConfig c = eval_config;
        c.policy = p;
        c.Validate();
        configs.push_back(c);
      }
      const at::SuiteSummary summary = at::RunSuite(
          configs, ParseSeedRange(eval_seeds), map, eval_workers);
      WriteFile(eval_out, at::SuiteCsv(summary));
      std::fputs(at::SuiteTable(summary).c_str(), stdout);
      for (const auto& row : summary.episodes) {
        if (row.failed) return 1;
      }
      return 0;
    }
    if (*replay) {
      const at::ReplayFiles files = at::ServeReplay(replay_episode, replay_dir);
      std::printf("%s\n%s\n%s\n%s\n%s\n", files.trajectory.c_str(),
                  files.entropy.c_str(), files.nll.c_str(), files.rmse.c_str(),
                  files.metrics.c_str());
      return 0;
    }
    if (*write_map) {
      if (fs::path(map_out).has_parent_path()) {
        fs::create_directories(fs::path(map_out).parent_path());
      }
      at::WritePgm(at::MakeHouseMap(), map_out);
      return 0;
    }
  } catch (const at::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
