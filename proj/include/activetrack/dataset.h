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

#ifndef ACTIVETRACK_DATASET_H_
#define ACTIVETRACK_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "activetrack/estimation.h"
#include "activetrack/experts.h"
#include "activetrack/metrics.h"
#include "activetrack/world.h"

namespace activetrack {

inline constexpr int kEpisodeFormatVersion = 1;
inline constexpr int kDefaultMaxTargets = 8;
inline constexpr int kDefaultEgoSize = 64;

// Target slot fed to the learned policy: the belief mean in the agent frame
// and the covariance scaled by 1 / log det(sigma_bar), stored as the upper
// triangle (s11, s12, s22).
struct TargetFeature {
  std::array<double, 2> mu{};
  std::array<double, 3> sigma{};
  int mask = 1;

  friend bool operator==(const TargetFeature&, const TargetFeature&) = default;
};

// Position p expressed in the agent frame (rotation by -theta about the
// agent).
Vec2 ToAgentFrame(const AgentPose& pose, const Vec2& p);

// Slots in ascending id order for every belief in the bank, then the
// undetected placeholder until n_max slots are filled. Placeholders are
// always masked; a belief slot is masked iff log det of its stored (scaled)
// covariance is >= 1. Throws TooManyTargets.
std::vector<TargetFeature> MakeTargetFeatures(const FilterBank& bank,
                                              const AgentPose& pose,
                                              int n_max);

struct TruthPoint {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const TruthPoint&, const TruthPoint&) = default;
};

struct StepRecord {
  int t = 0;
  AgentPose pose;
  EgoMap ego_map;
  std::vector<TargetFeature> target_features;
  // Absent in observation-only records.
  std::optional<AgentCommand> action;
  PlannerMode mode;
  std::string expert_id;
  // Replay data: true target positions and the metrics of this step.
  std::vector<TruthPoint> truths;
  std::optional<MetricsFrame> metrics;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeHeader {
  int version = kEpisodeFormatVersion;
  std::string map_path;
  double resolution = 0.1;
  int n_max = kDefaultMaxTargets;
  int ego_size = kDefaultEgoSize;
  FieldOfView fov;
  std::uint64_t seed = 0;
  std::string expert_id;
  int n_y = 0;
  double dt = 0.5;
  int map_width = 0;
  int map_height = 0;
  double sigma_bar_logdet = 0.0;
  bool failed = false;
  std::string failure;

  friend bool operator==(const EpisodeHeader&, const EpisodeHeader&) = default;
};

struct EpisodeRecord {
  EpisodeHeader header;
  std::vector<StepRecord> steps;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

// Append-only step log with strictly increasing time.
class EpisodeBuffer {
 public:
  // Throws NonMonotonicTime.
  void RecordStep(StepRecord record);
  const std::vector<StepRecord>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  std::vector<StepRecord> Release() { return std::move(steps_); }

 private:
  std::vector<StepRecord> steps_;
};

std::string Base64Encode(const std::vector<std::uint8_t>& bytes);
// Returns nullopt on malformed input.
std::optional<std::vector<std::uint8_t>> Base64Decode(std::string_view text);

nlohmann::json HeaderToJson(const EpisodeHeader& header);
nlohmann::json StepToJson(const StepRecord& step);
// `where` names the input location in error messages. Throws
// MalformedEpisode.
StepRecord StepFromJson(const nlohmann::json& j, int ego_size,
                        const std::string& where);

// JSON Lines: header object, then one line per step.
std::string SerializeEpisode(const EpisodeRecord& episode);
// Throws MalformedEpisode or VersionMismatch.
EpisodeRecord ParseEpisode(std::string_view text);

void WriteEpisode(const EpisodeRecord& episode,
                  const std::filesystem::path& path);
EpisodeRecord ReadEpisode(const std::filesystem::path& path);

struct TrainingWindow {
  // Decision step: observations cover [t - T_o + 1, t], actions [t, t + T_a).
  int t = 0;
  std::vector<StepRecord> observations;  // actions stripped
  std::vector<AgentCommand> actions;
};

// One window per decision step t with t >= T_o - 1 and t + T_a <= length,
// in order of t; windows whose steps are not consecutive are skipped.
std::vector<TrainingWindow> BuildTrainingWindows(const EpisodeRecord& episode,
                                                 int t_o, int t_a);

// Writes manifest.json listing the episode files with the shared config.
void WriteManifest(const std::filesystem::path& dir,
                   const std::vector<std::string>& files,
                   const nlohmann::json& config);

}  // namespace activetrack

#endif  // ACTIVETRACK_DATASET_H_
