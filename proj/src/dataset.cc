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

#include "activetrack/dataset.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "activetrack/errors.h"

namespace activetrack {

using nlohmann::json;

Vec2 ToAgentFrame(const AgentPose& pose, const Vec2& p) {
  const Vec2 d = p - pose.position();
  const double c = std::cos(pose.theta);
  const double s = std::sin(pose.theta);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

namespace {

TargetFeature FeatureFrom(const Vec2& mu, const Eigen::MatrixXd& sigma,
                          double scale_logdet, const AgentPose& pose) {
  const Eigen::Matrix2d scaled = sigma.topLeftCorner<2, 2>() / scale_logdet;
  const Vec2 local = ToAgentFrame(pose, mu);
  TargetFeature f;
  f.mu = {local.x(), local.y()};
  f.sigma = {scaled(0, 0), scaled(0, 1), scaled(1, 1)};
  f.mask = LogDet(scaled) >= 1.0 ? 1 : 0;
  return f;
}

}  // namespace

std::vector<TargetFeature> MakeTargetFeatures(const FilterBank& bank,
                                              const AgentPose& pose,
                                              int n_max) {
  if (static_cast<int>(bank.beliefs().size()) > n_max) {
    throw TooManyTargets(std::to_string(bank.beliefs().size()) +
                         " beliefs exceed " + std::to_string(n_max) +
                         " feature slots");
  }
  const double scale = LogDet(bank.sigma_bar());
  std::vector<TargetFeature> out;
  out.reserve(n_max);
  for (const auto& [id, belief] : bank.beliefs()) {  // ascending ids
    out.push_back(FeatureFrom(belief.position(), belief.sigma, scale, pose));
  }
  TargetFeature placeholder =
      FeatureFrom(Vec2::Zero(), bank.sigma_bar(), scale, pose);
  placeholder.mask = 1;
  while (static_cast<int>(out.size()) < n_max) out.push_back(placeholder);
  return out;
}

void EpisodeBuffer::RecordStep(StepRecord record) {
  if (!steps_.empty() && record.t <= steps_.back().t) {
    throw NonMonotonicTime("step t=" + std::to_string(record.t) +
                           " does not follow t=" +
                           std::to_string(steps_.back().t));
  }
  steps_.push_back(std::move(record));
}

std::string Base64Encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::optional<std::vector<std::uint8_t>> Base64Decode(std::string_view text) {
  if (text.size() % 4 != 0) return std::nullopt;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    const bool alnum = (ch >= 'A' && ch <= 'Z') || (ch >= 'a' && ch <= 'z') ||
                       (ch >= '0' && ch <= '9') || ch == '+' || ch == '/';
    const bool pad = ch == '=' && i + 2 >= text.size();
    if (!alnum && !pad) return std::nullopt;
  }
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() >= 2 && text[text.size() - 2] == '=') {
    if (padding == 0) return std::nullopt;
    ++padding;
  }
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(
      out.data(), reinterpret_cast<const unsigned char*>(text.data()),
      static_cast<int>(text.size()));
  if (n < 0) return std::nullopt;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

json HeaderToJson(const EpisodeHeader& h) {
  return json{
      {"version", h.version},
      {"map_path", h.map_path},
      {"resolution", h.resolution},
      {"N_max", h.n_max},
      {"ego_size", h.ego_size},
      {"fov", {{"radius", h.fov.radius}, {"half_angle", h.fov.half_angle}}},
      {"seed", h.seed},
      {"expert_id", h.expert_id},
      {"N_y", h.n_y},
      {"dt", h.dt},
      {"map_width", h.map_width},
      {"map_height", h.map_height},
      {"sigma_bar_logdet", h.sigma_bar_logdet},
      {"failed", h.failed},
      {"failure", h.failure},
  };
}

json StepToJson(const StepRecord& s) {
  json features = json::array();
  for (const TargetFeature& f : s.target_features) {
    features.push_back(
        {{"mu", f.mu}, {"sigma", f.sigma}, {"mask", f.mask}});
  }
  json j{
      {"t", s.t},
      {"pose", {s.pose.x, s.pose.y, s.pose.theta}},
      {"ego_map", Base64Encode(s.ego_map.cells)},
      {"target_features", std::move(features)},
      {"mode", ToString(s.mode)},
      {"track_id", s.mode.target_id},
      {"expert_id", s.expert_id},
  };
  if (s.action) j["action"] = {s.action->v, s.action->omega};
  if (!s.truths.empty()) {
    json truths = json::array();
    for (const TruthPoint& p : s.truths) truths.push_back({p.id, p.x, p.y});
    j["truths"] = std::move(truths);
  }
  if (s.metrics) {
    const MetricsFrame& m = *s.metrics;
    j["metrics"] = {{"rmse", m.rmse},
                    {"entropy", m.entropy},
                    {"nll", m.nll},
                    {"detected_count", m.detected_count},
                    {"N_y", m.n_y}};
  }
  return j;
}

namespace {

[[noreturn]] void Malformed(const std::string& where, const std::string& what) {
  throw MalformedEpisode(where + ": " + what);
}

template <typename T>
T Field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    Malformed(where, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    Malformed(where, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

StepRecord StepFromJson(const json& j, int ego_size, const std::string& where) {
  StepRecord s;
  s.t = Field<int>(j, "t", where);
  const auto pose = Field<std::vector<double>>(j, "pose", where);
  if (pose.size() != 3) Malformed(where, "pose needs 3 values");
  s.pose = {pose[0], pose[1], pose[2]};

  const auto encoded = Field<std::string>(j, "ego_map", where);
  auto bytes = Base64Decode(encoded);
  if (!bytes) Malformed(where, "ego_map is not valid base64");
  if (bytes->size() != static_cast<std::size_t>(ego_size) * ego_size) {
    Malformed(where, "ego_map has " + std::to_string(bytes->size()) +
                         " bytes, expected " +
                         std::to_string(ego_size * ego_size));
  }
  for (std::uint8_t b : *bytes) {
    if (b > 2) Malformed(where, "ego_map value out of range");
  }
  s.ego_map.size = ego_size;
  s.ego_map.cells = std::move(*bytes);

  const json features = Field<json>(j, "target_features", where);
  if (!features.is_array()) Malformed(where, "target_features not an array");
  for (const json& f : features) {
    TargetFeature tf;
    tf.mu = Field<std::array<double, 2>>(f, "mu", where);
    tf.sigma = Field<std::array<double, 3>>(f, "sigma", where);
    tf.mask = Field<int>(f, "mask", where);
    if (tf.mask != 0 && tf.mask != 1) Malformed(where, "mask must be 0 or 1");
    s.target_features.push_back(tf);
  }

  const auto mode = Field<std::string>(j, "mode", where);
  if (mode == "track") {
    s.mode = PlannerMode::Track(Field<int>(j, "track_id", where));
  } else if (mode == "explore") {
    s.mode = PlannerMode::Explore();
    if (j.contains("track_id")) s.mode.target_id = Field<int>(j, "track_id", where);
  } else {
    Malformed(where, "unknown mode '" + mode + "'");
  }
  s.expert_id = Field<std::string>(j, "expert_id", where);

  if (j.contains("action")) {
    const auto a = Field<std::vector<double>>(j, "action", where);
    if (a.size() != 2) Malformed(where, "action needs 2 values");
    s.action = AgentCommand{a[0], a[1]};
  }
  if (j.contains("truths")) {
    const json truths = Field<json>(j, "truths", where);
    if (!truths.is_array()) Malformed(where, "truths not an array");
    for (const json& p : truths) {
      if (!p.is_array() || p.size() != 3) Malformed(where, "bad truth entry");
      try {
        s.truths.push_back(
            {p[0].get<int>(), p[1].get<double>(), p[2].get<double>()});
      } catch (const json::exception& e) {
        Malformed(where, std::string("bad truth entry: ") + e.what());
      }
    }
  }
  if (j.contains("metrics")) {
    const json m = Field<json>(j, "metrics", where);
    MetricsFrame f;
    f.t = s.t;
    f.rmse = Field<double>(m, "rmse", where);
    f.entropy = Field<double>(m, "entropy", where);
    f.nll = Field<double>(m, "nll", where);
    f.detected_count = Field<int>(m, "detected_count", where);
    f.n_y = Field<int>(m, "N_y", where);
    s.metrics = f;
  }
  return s;
}

std::string SerializeEpisode(const EpisodeRecord& episode) {
  std::string out = HeaderToJson(episode.header).dump();
  out += '\n';
  for (const StepRecord& s : episode.steps) {
    out += StepToJson(s).dump();
    out += '\n';
  }
  return out;
}

EpisodeRecord ParseEpisode(std::string_view text) {
  EpisodeRecord episode;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      Malformed(where, std::string("invalid JSON: ") + e.what());
    }
    if (!have_header) {
      EpisodeHeader& h = episode.header;
      h.version = Field<int>(j, "version", where);
      if (h.version != kEpisodeFormatVersion) {
        throw VersionMismatch("episode format version " +
                              std::to_string(h.version) + ", expected " +
                              std::to_string(kEpisodeFormatVersion));
      }
      h.map_path = Field<std::string>(j, "map_path", where);
      h.resolution = Field<double>(j, "resolution", where);
      h.n_max = Field<int>(j, "N_max", where);
      h.ego_size = Field<int>(j, "ego_size", where);
      const json fov = Field<json>(j, "fov", where);
      h.fov.radius = Field<double>(fov, "radius", where);
      h.fov.half_angle = Field<double>(fov, "half_angle", where);
      h.seed = Field<std::uint64_t>(j, "seed", where);
      h.expert_id = Field<std::string>(j, "expert_id", where);
      h.n_y = Field<int>(j, "N_y", where);
      if (j.contains("dt")) h.dt = Field<double>(j, "dt", where);
      if (j.contains("map_width")) h.map_width = Field<int>(j, "map_width", where);
      if (j.contains("map_height")) {
        h.map_height = Field<int>(j, "map_height", where);
      }
      if (j.contains("sigma_bar_logdet")) {
        h.sigma_bar_logdet = Field<double>(j, "sigma_bar_logdet", where);
      }
      if (j.contains("failed")) h.failed = Field<bool>(j, "failed", where);
      if (j.contains("failure")) h.failure = Field<std::string>(j, "failure", where);
      have_header = true;
      continue;
    }
    episode.steps.push_back(StepFromJson(j, episode.header.ego_size, where));
  }
  if (!have_header) throw MalformedEpisode("line 1: missing header");
  return episode;
}

void WriteEpisode(const EpisodeRecord& episode,
                  const std::filesystem::path& path) {
  if (episode.steps.empty()) {
    throw MalformedEpisode("refusing to write an episode without steps");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedEpisode("cannot open " + path.string());
  out << SerializeEpisode(episode);
}

EpisodeRecord ReadEpisode(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedEpisode("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseEpisode(buf.str());
}

std::vector<TrainingWindow> BuildTrainingWindows(const EpisodeRecord& episode,
                                                 int t_o, int t_a) {
  if (t_o < 1 || t_a < 1) throw InvalidConfig("T_o and T_a must be >= 1");
  const auto& steps = episode.steps;
  const int length = static_cast<int>(steps.size());
  std::vector<TrainingWindow> out;
  for (int i = t_o - 1; i + t_a <= length; ++i) {
    const int first = i - t_o + 1;
    const int last = i + t_a - 1;
    bool consecutive = true;
    for (int k = first + 1; k <= last && consecutive; ++k) {
      consecutive = steps[k].t == steps[k - 1].t + 1;
    }
    if (!consecutive) continue;
    TrainingWindow w;
    w.t = steps[i].t;
    for (int k = first; k <= i; ++k) {
      StepRecord obs = steps[k];
      obs.action.reset();
      w.observations.push_back(std::move(obs));
    }
    for (int k = i; k <= last; ++k) {
      w.actions.push_back(steps[k].action.value_or(AgentCommand{}));
    }
    out.push_back(std::move(w));
  }
  return out;
}

void WriteManifest(const std::filesystem::path& dir,
                   const std::vector<std::string>& files, const json& config) {
  json manifest{{"version", kEpisodeFormatVersion},
                {"episodes", files},
                {"config", config}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.dump(2) << '\n';
}

}  // namespace activetrack
