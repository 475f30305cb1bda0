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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "activetrack/dataset.h"
#include "activetrack/errors.h"
#include "activetrack/estimation.h"
#include "activetrack/rng.h"

namespace activetrack {
namespace {

namespace fs = std::filesystem;

Eigen::MatrixXd I2() { return Eigen::MatrixXd::Identity(2, 2); }

FilterBank EmptyBank() {
  return FilterBank(FilterModel::Default(), 200.0 * I2(), 0.25 * I2());
}

void AddBelief(FilterBank& bank, int id, double x, double y,
               const Eigen::MatrixXd& sigma, bool detected = true) {
  Belief b;
  b.mu = Eigen::Vector2d(x, y);
  b.sigma = sigma;
  b.status = detected ? TrackStatus::kTracked : TrackStatus::kLost;
  bank.mutable_beliefs()[id] = b;
  if (detected) bank.mutable_detected().insert(id);
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("activetrack_dataset_" + name + "_" +
                        std::to_string(::testing::UnitTest::GetInstance()
                                           ->random_seed()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// ------------------------------------------------------------------ features

TEST(TargetFeaturesTest, NoBeliefsGivesMaskedPlaceholders) {
  const auto f = MakeTargetFeatures(EmptyBank(), {0, 0, 0}, 6);
  ASSERT_EQ(f.size(), 6u);
  const double scale = std::log(200.0 * 200.0);
  for (const TargetFeature& slot : f) {
    EXPECT_EQ(slot.mask, 1);
    EXPECT_NEAR(slot.sigma[0], 200.0 / scale, 1e-12);
    EXPECT_EQ(slot.sigma[1], 0.0);
    EXPECT_NEAR(slot.sigma[2], 200.0 / scale, 1e-12);
  }
}

TEST(TargetFeaturesTest, IdentityTransform) {
  FilterBank bank = EmptyBank();
  AddBelief(bank, 0, 1, 0, 0.1 * I2());
  const auto f = MakeTargetFeatures(bank, {0, 0, 0}, 4);
  EXPECT_NEAR(f[0].mu[0], 1.0, 1e-15);
  EXPECT_NEAR(f[0].mu[1], 0.0, 1e-15);
  EXPECT_EQ(f[0].mask, 0);
  EXPECT_EQ(f[1].mask, 1);
}

TEST(TargetFeaturesTest, QuarterTurnRotatesIntoAgentFrame) {
  FilterBank bank = EmptyBank();
  AddBelief(bank, 0, 0, 1, 0.1 * I2());
  const auto f = MakeTargetFeatures(bank, {0, 0, std::numbers::pi / 2}, 4);
  EXPECT_NEAR(f[0].mu[0], 1.0, 1e-12);
  EXPECT_NEAR(f[0].mu[1], 0.0, 1e-12);
}

TEST(TargetFeaturesTest, TranslationAndRotation) {
  // Hand-applied: d = (3-1, 2-2) = (2, 0), theta = pi -> (-2, 0).
  EXPECT_NEAR(ToAgentFrame({1, 2, std::numbers::pi}, {3, 2}).x(), -2.0, 1e-12);
  EXPECT_NEAR(ToAgentFrame({1, 2, std::numbers::pi}, {3, 2}).y(), 0.0, 1e-12);
  // Facing -y, a point at +y is directly behind.
  EXPECT_NEAR(ToAgentFrame({0, 0, -std::numbers::pi / 2}, {0, 1}).x(), -1.0, 1e-12);
}

TEST(TargetFeaturesTest, AscendingIdsAndScaledCovariance) {
  FilterBank bank = EmptyBank();
  Eigen::MatrixXd s(2, 2);
  s << 4, 1, 1, 3;
  AddBelief(bank, 5, 1, 1, s);
  AddBelief(bank, 2, 2, 2, 1e6 * I2(), false);
  const auto f = MakeTargetFeatures(bank, {0, 0, 0}, 3);
  const double scale = std::log(40000.0);
  EXPECT_NEAR(f[0].mu[0], 2.0, 1e-12);  // id 2 first
  EXPECT_EQ(f[0].mask, 1);              // very uncertain
  EXPECT_NEAR(f[1].sigma[0], 4 / scale, 1e-12);
  EXPECT_NEAR(f[1].sigma[1], 1 / scale, 1e-12);
  EXPECT_NEAR(f[1].sigma[2], 3 / scale, 1e-12);
  EXPECT_EQ(f[1].mask, 0);
  EXPECT_EQ(f[2].mask, 1);
}

TEST(TargetFeaturesTest, TooManyTargets) {
  FilterBank bank = EmptyBank();
  for (int id = 0; id < 3; ++id) AddBelief(bank, id, id, 0, I2());
  EXPECT_THROW(MakeTargetFeatures(bank, {}, 2), TooManyTargets);
  EXPECT_EQ(MakeTargetFeatures(bank, {}, 3).size(), 3u);
}

// ---------------------------------------------------------------- recording

StepRecord RandomStep(Rng& rng, int t, int ego_size, int n_max) {
  StepRecord s;
  s.t = t;
  s.pose = {rng.Uniform(0, 20), rng.Uniform(0, 20), rng.Uniform(-3, 3)};
  s.ego_map.size = ego_size;
  s.ego_map.cells.resize(static_cast<std::size_t>(ego_size * ego_size));
  for (auto& c : s.ego_map.cells) c = static_cast<std::uint8_t>(rng.UniformInt(0, 2));
  for (int k = 0; k < n_max; ++k) {
    TargetFeature f;
    f.mu = {rng.Normal(), rng.Normal()};
    f.sigma = {rng.Uniform(), rng.Normal() * 1e-7, rng.Uniform() * 1e5};
    f.mask = rng.UniformInt(0, 1);
    s.target_features.push_back(f);
  }
  if (rng.Uniform() < 0.9) s.action = AgentCommand{rng.Uniform(0, 1), rng.Uniform(-1, 1)};
  s.mode = rng.Uniform() < 0.5 ? PlannerMode::Explore()
                               : PlannerMode::Track(rng.UniformInt(0, 5));
  s.expert_id = rng.Uniform() < 0.5 ? "frontier" : "time";
  const int n_truth = rng.UniformInt(0, 4);
  for (int k = 0; k < n_truth; ++k) {
    s.truths.push_back({k, rng.Uniform(0, 20), rng.Uniform(0, 20)});
  }
  if (rng.Uniform() < 0.8) {
    s.metrics = MetricsFrame{t, rng.Uniform(0, 30), rng.Normal() * 10,
                             rng.Uniform(0, 100), rng.UniformInt(0, 3), 3};
  }
  return s;
}

EpisodeRecord RandomEpisode(Rng& rng, int length) {
  EpisodeRecord e;
  e.header.map_path = "builtin:house";
  e.header.ego_size = rng.UniformInt(2, 12);
  e.header.n_max = rng.UniformInt(1, 8);
  e.header.seed = rng.UniformInt(0, 1 << 30);
  e.header.expert_id = "uncertainty";
  e.header.n_y = 3;
  e.header.map_width = 200;
  e.header.map_height = 160;
  e.header.sigma_bar_logdet = rng.Uniform(1, 20);
  e.header.failed = rng.Uniform() < 0.2;
  if (e.header.failed) e.header.failure = "NoPath: \"quoted\"\nline";
  for (int t = 0; t < length; ++t) {
    e.steps.push_back(RandomStep(rng, t, e.header.ego_size, e.header.n_max));
  }
  return e;
}

TEST(EpisodeBufferTest, RecordStep) {
  EpisodeBuffer buffer;
  StepRecord s;
  s.t = 0;
  buffer.RecordStep(s);
  s.t = 1;
  buffer.RecordStep(s);
  EXPECT_EQ(buffer.size(), 2u);
  EXPECT_THROW(buffer.RecordStep(s), NonMonotonicTime);
  s.t = 0;
  EXPECT_THROW(buffer.RecordStep(s), NonMonotonicTime);
  EXPECT_EQ(buffer.size(), 2u);
}

TEST(EpisodeBufferTest, ReplayEqualsInput) {
  CounterRng rng(1);
  EpisodeBuffer buffer;
  std::vector<StepRecord> input;
  for (int t = 0; t < 500; ++t) {
    input.push_back(RandomStep(rng, 2 * t + 3, 4, 2));
    buffer.RecordStep(input.back());
  }
  EXPECT_EQ(buffer.steps(), input);
  EXPECT_EQ(buffer.Release(), input);
}

// --------------------------------------------------------------- file format

TEST(Base64Test, KnownVectorsAndRoundTrip) {
  EXPECT_EQ(Base64Encode({}), "");
  EXPECT_EQ(Base64Encode({'f'}), "Zg==");
  EXPECT_EQ(Base64Encode({'f', 'o'}), "Zm8=");
  EXPECT_EQ(Base64Encode({'f', 'o', 'o'}), "Zm9v");
  EXPECT_EQ(*Base64Decode("Zm8="), (std::vector<std::uint8_t>{'f', 'o'}));
  EXPECT_FALSE(Base64Decode("Zm8").has_value());
  EXPECT_FALSE(Base64Decode("Zm!=").has_value());
  EXPECT_FALSE(Base64Decode("Z=8=").has_value());
  CounterRng rng(2);
  for (int n = 0; n < 200; ++n) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(n));
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.UniformInt(0, 255));
    ASSERT_EQ(*Base64Decode(Base64Encode(bytes)), bytes);
  }
}

TEST(EpisodeFileTest, ThreeStepRoundTrip) {
  CounterRng rng(3);
  const EpisodeRecord e = RandomEpisode(rng, 3);
  const fs::path dir = TempDir("three");
  WriteEpisode(e, dir / "e.jsonl");
  EXPECT_EQ(ReadEpisode(dir / "e.jsonl"), e);
  fs::remove_all(dir);
}

TEST(EpisodeFileTest, RandomRoundTripIsExact) {
  CounterRng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const EpisodeRecord e = RandomEpisode(rng, rng.UniformInt(1, 20));
    const std::string text = SerializeEpisode(e);
    const EpisodeRecord back = ParseEpisode(text);
    ASSERT_EQ(back, e) << "trial " << trial;
    ASSERT_EQ(SerializeEpisode(back), text);
  }
}

TEST(EpisodeFileTest, OneJsonObjectPerLine) {
  CounterRng rng(5);
  const std::string text = SerializeEpisode(RandomEpisode(rng, 4));
  std::istringstream in(text);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_TRUE(nlohmann::json::parse(line).is_object());
    ++lines;
  }
  EXPECT_EQ(lines, 5);
}

TEST(EpisodeFileTest, WrongVersion) {
  CounterRng rng(6);
  std::string text = SerializeEpisode(RandomEpisode(rng, 2));
  const std::size_t nl = text.find('\n');
  nlohmann::json header = nlohmann::json::parse(text.substr(0, nl));
  header["version"] = 7;
  text = header.dump() + text.substr(nl);
  EXPECT_THROW(ParseEpisode(text), VersionMismatch);
}

TEST(EpisodeFileTest, CorruptBase64NamesTheLine) {
  CounterRng rng(7);
  std::string text = SerializeEpisode(RandomEpisode(rng, 3));
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  nlohmann::json step = nlohmann::json::parse(lines[2]);
  step["ego_map"] = "@@not-base64@@";
  lines[2] = step.dump();
  std::string broken;
  for (const auto& l : lines) broken += l + "\n";
  try {
    ParseEpisode(broken);
    FAIL() << "expected MalformedEpisode";
  } catch (const MalformedEpisode& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(EpisodeFileTest, RejectsBadContent) {
  CounterRng rng(8);
  const EpisodeRecord e = RandomEpisode(rng, 2);
  const std::string text = SerializeEpisode(e);
  EXPECT_THROW(ParseEpisode(""), MalformedEpisode);
  EXPECT_THROW(ParseEpisode("{not json}\n"), MalformedEpisode);
  EXPECT_THROW(ParseEpisode(text + "[1,2]\n"), MalformedEpisode);

  // Ego value outside {0, 1, 2}.
  StepRecord bad = e.steps[0];
  bad.ego_map.cells[0] = 3;
  EXPECT_THROW(StepFromJson(StepToJson(bad), e.header.ego_size, "x"),
               MalformedEpisode);
  // Wrong ego size.
  EXPECT_THROW(StepFromJson(StepToJson(e.steps[0]), e.header.ego_size + 1, "x"),
               MalformedEpisode);
  EXPECT_THROW(WriteEpisode(EpisodeRecord{}, TempDir("empty") / "e.jsonl"),
               Error);
}

TEST(EpisodeFileTest, ObservationShapedRecordOmitsAction) {
  CounterRng rng(9);
  StepRecord s = RandomStep(rng, 0, 3, 1);
  s.action.reset();
  const nlohmann::json j = StepToJson(s);
  EXPECT_FALSE(j.contains("action"));
  EXPECT_EQ(StepFromJson(j, 3, "x"), s);
}

// ------------------------------------------------------------------ windows

EpisodeRecord CountingEpisode(int length) {
  EpisodeRecord e;
  e.header.ego_size = 2;
  for (int t = 0; t < length; ++t) {
    StepRecord s;
    s.t = t;
    s.ego_map = {2, {0, 1, 2, 0}};
    s.action = AgentCommand{0.01 * t, -0.001 * t};
    e.steps.push_back(s);
  }
  return e;
}

TEST(TrainingWindowsTest, Counts) {
  EXPECT_EQ(BuildTrainingWindows(CountingEpisode(100), 2, 16).size(), 84u);
  EXPECT_TRUE(BuildTrainingWindows(CountingEpisode(16), 2, 16).empty());
  EXPECT_EQ(BuildTrainingWindows(CountingEpisode(17), 2, 16).size(), 1u);
  for (int length : {1, 5, 30, 77}) {
    for (int t_o : {1, 2, 4}) {
      for (int t_a : {1, 3, 16}) {
        const int expected = std::max(0, length - t_a - t_o + 2);
        EXPECT_EQ(static_cast<int>(
                      BuildTrainingWindows(CountingEpisode(length), t_o, t_a).size()),
                  expected);
      }
    }
  }
  EXPECT_THROW(BuildTrainingWindows(CountingEpisode(10), 0, 2), InvalidConfig);
}

TEST(TrainingWindowsTest, EnumerationReproducesActionStream) {
  const EpisodeRecord e = CountingEpisode(100);
  const auto windows = BuildTrainingWindows(e, 2, 16);
  // Stride 1: the first action of each window, then the tail of the last.
  std::vector<AgentCommand> stream;
  for (const auto& w : windows) stream.push_back(w.actions.front());
  stream.insert(stream.end(), windows.back().actions.begin() + 1,
                windows.back().actions.end());
  ASSERT_EQ(stream.size(), 99u);  // step 0 precedes the first decision
  for (std::size_t k = 0; k < stream.size(); ++k) {
    ASSERT_EQ(stream[k], *e.steps[k + 1].action);
  }
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    EXPECT_EQ(w.t, static_cast<int>(i) + 1);
    ASSERT_EQ(w.observations.size(), 2u);
    ASSERT_EQ(w.actions.size(), 16u);
    EXPECT_EQ(w.observations[0].t, w.t - 1);
    EXPECT_EQ(w.observations[1].t, w.t);
    for (const auto& o : w.observations) EXPECT_FALSE(o.action.has_value());
    for (int k = 0; k < 16; ++k) EXPECT_EQ(w.actions[k], *e.steps[w.t + k].action);
  }
}

TEST(TrainingWindowsTest, WindowsNeverSpanGaps) {
  EpisodeRecord e = CountingEpisode(40);
  e.steps.erase(e.steps.begin() + 20);  // t jumps 19 -> 21
  for (const auto& w : BuildTrainingWindows(e, 2, 4)) {
    const int first = w.t - 1, last = w.t + 3;
    EXPECT_FALSE(first <= 20 && 20 <= last) << "window at " << w.t;
  }
}

TEST(ManifestTest, Written) {
  const fs::path dir = TempDir("manifest");
  WriteManifest(dir, {"a.jsonl", "b.jsonl"}, {{"seed_base", 3}});
  std::ifstream in(dir / "manifest.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  EXPECT_EQ(j["version"], kEpisodeFormatVersion);
  EXPECT_EQ(j["episodes"], (nlohmann::json{"a.jsonl", "b.jsonl"}));
  EXPECT_EQ(j["config"]["seed_base"], 3);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace activetrack
