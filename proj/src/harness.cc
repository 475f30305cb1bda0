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

#include "activetrack/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <thread>

#include "activetrack/errors.h"

namespace activetrack {

ExpertKind ParseExpert(const std::string& name) {
  if (name == "frontier") return ExpertKind::kFrontier;
  if (name == "uncertainty") return ExpertKind::kUncertainty;
  if (name == "time") return ExpertKind::kTime;
  throw InvalidConfig("unknown expert '" + name + "'");
}

std::string ToString(ExpertKind kind) {
  switch (kind) {
    case ExpertKind::kFrontier: return "frontier";
    case ExpertKind::kUncertainty: return "uncertainty";
    case ExpertKind::kTime: return "time";
  }
  return "?";
}

namespace {

bool StartsWith(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

bool EpisodeConfig::external() const {
  return StartsWith(policy, "bridge:") || StartsWith(policy, "scripted:");
}

void EpisodeConfig::Validate() const {
  sim.Validate();
  if (!external()) ParseExpert(policy);
  if (n_y < 0) throw InvalidConfig("N_y must be >= 0");
  if (n_y == 0 && (min_targets < 1 || max_targets < min_targets)) {
    throw InvalidConfig("target count range is empty");
  }
  if (std::max(n_y, max_targets) > n_max) {
    throw InvalidConfig("more targets than feature slots");
  }
  if (!(noise_scale_lo > 0.0) || noise_scale_hi < noise_scale_lo) {
    throw InvalidConfig("noise scale range must satisfy 0 < lo <= hi");
  }
  if (track_duration < 1) throw InvalidConfig("track_duration must be >= 1");
  if (replan_interval < 1) throw InvalidConfig("replan_interval must be >= 1");
  if (t_o < 1 || t_a < 1) throw InvalidConfig("T_o and T_a must be >= 1");
  if (t_exec < 1 || t_exec > t_a) {
    throw InvalidConfig("T_exec must satisfy 1 <= T_exec <= T_a");
  }
  if (ego_size < 1) throw InvalidConfig("ego_size must be >= 1");
  if (!(bridge_timeout_s > 0.0) || bridge_retries < 0) {
    throw InvalidConfig("bridge timeout must be positive, retries >= 0");
  }
  if (!(init_sigma_scale > 0.0)) {
    throw InvalidConfig("init_sigma_scale must be positive");
  }
  if (sim.target_A.rows() != 2) {
    throw InvalidConfig("the harness simulates 2-D target states");
  }
}

OccupancyGrid LoadEpisodeMap(const std::string& map_path, double resolution) {
  if (map_path.empty() || map_path == "builtin:house") {
    return MakeHouseMap(resolution);
  }
  return LoadMap(map_path, resolution);
}

namespace {

std::vector<Cell> FreeCells(const OccupancyGrid& grid) {
  std::vector<Cell> out;
  for (int i = 0; i < grid.size(); ++i) {
    const Cell c = grid.CellAt(i);
    if (grid.IsFree(c)) out.push_back(c);
  }
  return out;
}

}  // namespace

EpisodeSetup DrawSetup(const EpisodeConfig& config, const OccupancyGrid& map) {
  CounterRng rng = MakeStream(config.sim.seed, Stream::kSetup);
  EpisodeSetup setup;
  setup.n_y = config.n_y > 0
                  ? config.n_y
                  : rng.UniformInt(config.min_targets, config.max_targets);
  const double wx = rng.Uniform(config.noise_scale_lo, config.noise_scale_hi);
  const double wy = rng.Uniform(config.noise_scale_lo, config.noise_scale_hi);
  setup.target_W = Eigen::Vector2d(wx * wx, wy * wy).asDiagonal();

  const OccupancyGrid inflated =
      Inflate(map, RrtParams::ForResolution(map.resolution()).safety_margin);
  std::vector<Cell> agent_cells = FreeCells(inflated);
  if (agent_cells.empty()) agent_cells = FreeCells(map);
  if (agent_cells.empty()) throw EmptyFreeSpace("map has no free cell");
  const Cell start = agent_cells[static_cast<std::size_t>(
      rng.UniformInt(0, static_cast<int>(agent_cells.size()) - 1))];
  const Vec2 p = map.CellCenter(start);
  setup.agent = {p.x(), p.y(), rng.Uniform(-std::numbers::pi, std::numbers::pi)};

  const std::vector<Cell> target_cells = FreeCells(map);
  for (int id = 0; id < setup.n_y; ++id) {
    const Cell c = target_cells[static_cast<std::size_t>(
        rng.UniformInt(0, static_cast<int>(target_cells.size()) - 1))];
    setup.targets.push_back({id, map.CellCenter(c)});
  }
  return setup;
}

namespace {

class ExpertDriver {
 public:
  ExpertDriver(ExpertKind kind, const EpisodeConfig& config,
               const OccupancyGrid& grid, double threshold)
      : kind_(kind),
        config_(config),
        threshold_(threshold),
        ctx_(PlanningContext::Make(
            grid, FrontierWeights::ForResolution(grid.resolution()),
            RrtParams::ForResolution(grid.resolution()),
            config.sim.fov.radius)) {}

  struct Decision {
    AgentCommand command;
    PlannerMode mode;
    bool replanned = false;
  };

  Decision Step(int t, const FilterBank& bank, const AgentPose& pose) {
    ++ctx_.visits[ctx_.grid->Index(ctx_.grid->CellOf(pose.position()))];

    PlannerMode decided;
    switch (kind_) {
      case ExpertKind::kFrontier:
        break;
      case ExpertKind::kUncertainty:
        decided = DecideUncertaintyMode(bank, threshold_);
        break;
      case ExpertKind::kTime:
        decided = AdvanceTrackTimer(timer_, bank.detected(),
                                    config_.track_duration);
        break;
    }

    Vec2 goal = Vec2::Zero();
    if (decided.tracking()) goal = bank.beliefs().at(decided.target_id).position();
    bool replan = !planned_ || decided != decided_ ||
                  since_plan_ >= config_.replan_interval || PathDone(pose);
    if (decided.tracking() && planned_ &&
        (goal - goal_).norm() > config_.controller.lookahead_distance) {
      replan = true;
    }

    if (replan) {
      CounterRng rng = MakeStream(config_.sim.seed, Stream::kPlanner,
                                  static_cast<std::uint64_t>(t));
      effective_ = decided;
      if (decided.tracking()) {
        try {
          path_ = PlanToPoint(pose, goal, ctx_, rng);
        } catch (const InvalidEndpoint&) {
          TrackFailed(pose, rng);
        } catch (const NoPath&) {
          TrackFailed(pose, rng);
        }
      } else {
        path_ = Explore(pose, rng);
      }
      decided_ = decided;
      goal_ = goal;
      planned_ = true;
      since_plan_ = 0;
    }
    ++since_plan_;

    ControllerParams params = config_.controller;
    params.v_max = config_.sim.v_max;
    params.omega_max = config_.sim.omega_max;
    return {LookaheadControl(pose, path_, params), effective_, replan};
  }

 private:
  bool PathDone(const AgentPose& pose) const {
    return path_.empty() || (pose.position() - path_.waypoints.back()).norm() <=
                                config_.controller.goal_tolerance;
  }

  // RRT* can miss a reachable frontier within its iteration budget. The agent
  // then holds for a step and the next attempt draws a new stream; the
  // visit count already pushes selection away from the missed goal.
  Path Explore(const AgentPose& pose, Rng& rng) {
    try {
      Path p = PlanFrontier(pose, ctx_, rng);
      missed_ = 0;
      return p;
    } catch (const NoPath&) {
      if (++missed_ >= kMaxMissedPlans) throw;
      return {};
    }
  }

  // Uncertainty expert explores instead; time expert holds Track and waits.
  void TrackFailed(const AgentPose& pose, Rng& rng) {
    if (kind_ == ExpertKind::kUncertainty) {
      effective_ = PlannerMode::Explore();
      path_ = Explore(pose, rng);
    } else {
      path_ = {};
    }
  }

  ExpertKind kind_;
  const EpisodeConfig& config_;
  double threshold_;
  PlanningContext ctx_;
  TrackTimer timer_;
  Path path_;
  PlannerMode decided_;
  PlannerMode effective_;
  Vec2 goal_ = Vec2::Zero();
  bool planned_ = false;
  int since_plan_ = 0;
  int missed_ = 0;
  static constexpr int kMaxMissedPlans = 10;
};

std::unique_ptr<ActionSource> MakeExternal(const EpisodeConfig& config) {
  if (StartsWith(config.policy, "scripted:")) {
    return std::make_unique<ScriptedPolicy>(
        ParseActionList(config.policy.substr(9)), config.t_a);
  }
  BridgePolicy::Options options;
  options.t_o = config.t_o;
  options.t_a = config.t_a;
  options.ego_size = config.ego_size;
  options.timeout = std::chrono::milliseconds(
      static_cast<long long>(std::llround(config.bridge_timeout_s * 1000.0)));
  options.retries = config.bridge_retries;
  return std::make_unique<BridgePolicy>(config.policy.substr(7), options);
}

}  // namespace

EpisodeResult RunEpisode(const EpisodeConfig& config, const OccupancyGrid& map,
                         ActionSource* external) {
  config.Validate();
  const SimConfig& sim = config.sim;
  EpisodeResult result;
  EpisodeHeader& header = result.record.header;
  header.map_path = config.map_path;
  header.resolution = map.resolution();
  header.n_max = config.n_max;
  header.ego_size = config.ego_size;
  header.fov = sim.fov;
  header.seed = sim.seed;
  header.expert_id = config.policy;
  header.dt = sim.dt;
  header.map_width = map.width();
  header.map_height = map.height();

  EpisodeBuffer buffer;
  try {
    OccupancyGrid grid = map;
    grid.ClearExplored();
    const EpisodeSetup setup = DrawSetup(config, map);
    header.n_y = setup.n_y;

    const double r = std::sqrt(sim.sensor_R(0, 0));
    const Eigen::MatrixXd init_sigma =
        std::pow(config.init_sigma_scale * r, 2) * Eigen::MatrixXd::Identity(2, 2);
    const Eigen::MatrixXd sigma_bar = DefaultSigmaBar(grid);
    header.sigma_bar_logdet = LogDet(sigma_bar);
    FilterBank bank(FilterModel::Default(), sigma_bar, init_sigma);
    const double threshold = std::isnan(config.sigma_threshold)
                                 ? LogDet(init_sigma) + 4.0
                                 : config.sigma_threshold;

    std::unique_ptr<ActionSource> owned;
    std::unique_ptr<ExpertDriver> expert;
    if (config.external()) {
      if (external == nullptr) {
        owned = MakeExternal(config);
        external = owned.get();
      }
    } else {
      expert = std::make_unique<ExpertDriver>(ParseExpert(config.policy),
                                              config, grid, threshold);
    }

    AgentPose pose = setup.agent;
    std::vector<TargetState> targets = setup.targets;
    std::deque<AgentCommand> queue;
    std::vector<StepRecord> history;  // observations without actions
    const double empty_rmse = grid.Diagonal();

    for (int t = 0; t < sim.episode_length; ++t) {
      CounterRng target_rng =
          MakeStream(sim.seed, Stream::kTargets, static_cast<std::uint64_t>(t));
      targets = StepTargets(targets, sim.target_A, setup.target_W, sim.dt, grid,
                            target_rng);
      CounterRng sensor_rng =
          MakeStream(sim.seed, Stream::kSensor, static_cast<std::uint64_t>(t));
      const std::vector<Measurement> z = Sense(pose, targets, sim.sensor_H,
                                               sim.sensor_R, grid, sim.fov,
                                               sensor_rng);
      bank.ProcessStep(z, pose, grid, sim.fov);
      UpdateExplored(grid, pose, sim.fov);

      StepRecord record;
      record.t = t;
      record.pose = pose;
      record.ego_map = EgocentricCrop(grid, pose, config.ego_size);
      record.target_features = MakeTargetFeatures(bank, pose, config.n_max);
      record.expert_id = config.policy;
      for (const TargetState& y : targets) {
        record.truths.push_back({y.id, y.state(0), y.state(1)});
      }

      StepDiagnostics diag;
      AgentCommand command;
      if (expert) {
        const auto decision = expert->Step(t, bank, pose);
        command = decision.command;
        record.mode = decision.mode;
        diag.replanned = decision.replanned;
      } else {
        history.push_back(record);
        if (queue.empty()) {
          std::vector<StepRecord> obs;
          for (int k = config.t_o - 1; k >= 0; --k) {
            const int idx = std::max(0, static_cast<int>(history.size()) - 1 - k);
            obs.push_back(history[static_cast<std::size_t>(idx)]);
          }
          std::vector<AgentCommand> reply = external->Query(t, obs);
          if (static_cast<int>(reply.size()) != config.t_a) {
            throw BridgeProtocolError("policy returned " +
                                      std::to_string(reply.size()) +
                                      " actions, expected " +
                                      std::to_string(config.t_a));
          }
          queue.assign(reply.begin(), reply.begin() + config.t_exec);
          result.replies.push_back(std::move(reply));
          diag.replanned = true;
        }
        command = queue.front();
        queue.pop_front();
        result.executed.push_back(command);
        command.omega *= config.omega_gain;
        if (static_cast<int>(history.size()) > config.t_o) {
          history.erase(history.begin());
        }
      }
      command = ClampCommand(command, sim.v_max, sim.omega_max);
      record.action = command;

      const MetricsFrame frame =
          ComputeMetrics(t, bank, ToTruthMap(targets), empty_rmse);
      record.metrics = frame;

      diag.t = t;
      diag.detected = bank.detected();
      for (const auto& [id, b] : bank.beliefs()) diag.statuses[id] = b.status;
      for (int id : bank.detected()) {
        diag.max_logdet = std::max(diag.max_logdet, LogDet(bank.beliefs().at(id).sigma));
      }
      diag.mode = record.mode;
      diag.explored_count = grid.ExploredCount();

      pose = StepAgent(pose, command, sim.dt, grid);

      result.metrics.push_back(frame);
      result.diagnostics.push_back(std::move(diag));
      buffer.RecordStep(std::move(record));
    }
  } catch (const Error& e) {
    result.failed = true;
    result.failure = e.what();
    result.error = std::current_exception();
  }
  header.failed = result.failed;
  header.failure = result.failure;
  result.record.steps = buffer.Release();
  return result;
}

SuiteRow SummarizeEpisode(const std::string& method, std::uint64_t seed,
                          const EpisodeResult& result) {
  SuiteRow row;
  row.method = method;
  row.seed = seed;
  row.steps = static_cast<int>(result.metrics.size());
  row.failed = result.failed;
  for (const MetricsFrame& f : result.metrics) {
    row.rmse += f.rmse;
    row.nll += f.nll;
    row.entropy += f.entropy;
  }
  if (row.steps > 0) {
    row.rmse /= row.steps;
    row.nll /= row.steps;
    row.entropy /= row.steps;
  }
  return row;
}

SuiteSummary RunSuite(const std::vector<EpisodeConfig>& configs,
                      const std::vector<std::uint64_t>& seeds,
                      const OccupancyGrid& map, int workers) {
  if (configs.empty() || seeds.empty()) {
    throw InvalidConfig("suite needs at least one method and one episode");
  }
  const std::size_t total = configs.size() * seeds.size();
  std::vector<SuiteRow> rows(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      EpisodeConfig config = configs[i / seeds.size()];
      config.sim.seed = seeds[i % seeds.size()];
      try {
        const EpisodeResult result = RunEpisode(config, map);
        rows[i] = SummarizeEpisode(config.policy, config.sim.seed, result);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(workers, 1, static_cast<int>(total));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SuiteSummary summary;
  summary.episodes = std::move(rows);
  for (std::size_t m = 0; m < configs.size(); ++m) {
    SuiteRow agg;
    agg.method = configs[m].policy;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const SuiteRow& row = summary.episodes[m * seeds.size() + s];
      agg.steps += row.steps;
      agg.rmse += row.rmse;
      agg.nll += row.nll;
      agg.entropy += row.entropy;
      agg.failed = agg.failed || row.failed;
    }
    const double k = static_cast<double>(seeds.size());
    agg.steps = static_cast<int>(std::lround(agg.steps / k));
    agg.rmse /= k;
    agg.nll /= k;
    agg.entropy /= k;
    summary.aggregates.push_back(agg);
  }
  return summary;
}

std::string SuiteCsv(const SuiteSummary& summary) {
  std::string out = "method,seed,steps,rmse,nll,entropy,failed\n";
  auto emit = [&out](const SuiteRow& r, const std::string& seed) {
    out += r.method + "," + seed + "," + std::to_string(r.steps) + "," +
           FormatDouble(r.rmse) + "," + FormatDouble(r.nll) + "," +
           FormatDouble(r.entropy) + "," + (r.failed ? "1" : "0") + "\n";
  };
  for (const SuiteRow& r : summary.episodes) emit(r, std::to_string(r.seed));
  for (const SuiteRow& r : summary.aggregates) emit(r, "mean");
  return out;
}

std::string SuiteTable(const SuiteSummary& summary) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %8s %6s %12s %12s %12s\n", "method",
                "seed", "steps", "rmse", "nll", "entropy");
  out += line;
  auto emit = [&](const SuiteRow& r, const std::string& seed) {
    std::snprintf(line, sizeof(line), "%-24s %8s %6d %12.4f %12.4f %12.4f%s\n",
                  r.method.c_str(), seed.c_str(), r.steps, r.rmse, r.nll,
                  r.entropy, r.failed ? "  FAILED" : "");
    out += line;
  };
  for (const SuiteRow& r : summary.episodes) emit(r, std::to_string(r.seed));
  for (const SuiteRow& r : summary.aggregates) emit(r, "mean");
  return out;
}

}  // namespace activetrack
