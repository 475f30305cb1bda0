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

#ifndef ACTIVETRACK_HARNESS_H_
#define ACTIVETRACK_HARNESS_H_

#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "activetrack/bridge.h"
#include "activetrack/controller.h"
#include "activetrack/dataset.h"
#include "activetrack/estimation.h"
#include "activetrack/experts.h"
#include "activetrack/metrics.h"
#include "activetrack/world.h"

namespace activetrack {

enum class ExpertKind { kFrontier, kUncertainty, kTime };

// "frontier", "uncertainty" or "time". Throws InvalidConfig.
ExpertKind ParseExpert(const std::string& name);
std::string ToString(ExpertKind kind);

struct EpisodeConfig {
  SimConfig sim;
  std::string map_path = "builtin:house";
  // Expert name, or "bridge:<command>" / "scripted:<v,w;...>" for an
  // external policy.
  std::string policy = "frontier";
  // Number of targets; 0 draws it uniformly from [min_targets, max_targets].
  int n_y = 0;
  int min_targets = 3;
  int max_targets = 6;
  // Per-axis process noise scale drawn from U[lo, hi] each episode.
  double noise_scale_lo = 0.8;
  double noise_scale_hi = 1.2;
  // Default (NaN): log det of the new-target covariance + 4.
  double sigma_threshold = std::numeric_limits<double>::quiet_NaN();
  int track_duration = 60;
  int replan_interval = 10;
  int t_o = 2;
  int t_a = 16;
  int t_exec = 8;
  int n_max = kDefaultMaxTargets;
  int ego_size = kDefaultEgoSize;
  // Scales external angular velocity commands before clamping.
  double omega_gain = 1.0;
  double bridge_timeout_s = 10.0;
  int bridge_retries = 1;
  // New-target covariance is (init_sigma_scale * r)^2 I, r the sensor noise
  // standard deviation.
  double init_sigma_scale = 10.0;
  ControllerParams controller;

  // Throws InvalidConfig.
  void Validate() const;
  bool external() const;
};

struct StepDiagnostics {
  int t = 0;
  std::set<int> detected;
  std::map<int, TrackStatus> statuses;
  // Largest log det over the detected set; kLogDetFloor when empty.
  double max_logdet = kLogDetFloor;
  PlannerMode mode;
  int explored_count = 0;
  bool replanned = false;
};

struct EpisodeResult {
  std::vector<MetricsFrame> metrics;
  EpisodeRecord record;
  std::vector<StepDiagnostics> diagnostics;
  // External policies: reply actions as executed, before gain and clamping.
  std::vector<AgentCommand> executed;
  std::vector<std::vector<AgentCommand>> replies;
  bool failed = false;
  std::string failure;
  std::exception_ptr error;
};

// Initial world drawn from the setup stream of `seed`.
struct EpisodeSetup {
  int n_y = 0;
  Eigen::MatrixXd target_W;
  AgentPose agent;
  std::vector<TargetState> targets;
};
EpisodeSetup DrawSetup(const EpisodeConfig& config, const OccupancyGrid& map);

// "builtin:house" or a PGM path at sim resolution 0.1 m.
OccupancyGrid LoadEpisodeMap(const std::string& map_path,
                             double resolution = 0.1);

// Runs one episode. `external` serves policies that are not experts; when
// null and the config names one, a ScriptedPolicy or BridgePolicy is built.
// Errors stop the loop; the partial trace is returned flagged failed.
EpisodeResult RunEpisode(const EpisodeConfig& config, const OccupancyGrid& map,
                         ActionSource* external = nullptr);

struct SuiteRow {
  std::string method;
  std::uint64_t seed = 0;
  int steps = 0;
  double rmse = 0.0;
  double nll = 0.0;
  double entropy = 0.0;
  bool failed = false;
};

struct SuiteSummary {
  std::vector<SuiteRow> episodes;    // method-major, seeds in order
  std::vector<SuiteRow> aggregates;  // one per method, seed 0
};

// Step-averaged metrics of one episode.
SuiteRow SummarizeEpisode(const std::string& method, std::uint64_t seed,
                          const EpisodeResult& result);

// Every config runs once per seed. Episodes run on `workers` threads, each
// with its own state and bridge child.
SuiteSummary RunSuite(const std::vector<EpisodeConfig>& configs,
                      const std::vector<std::uint64_t>& seeds,
                      const OccupancyGrid& map, int workers);

std::string SuiteCsv(const SuiteSummary& summary);
std::string SuiteTable(const SuiteSummary& summary);

}  // namespace activetrack

#endif  // ACTIVETRACK_HARNESS_H_
