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
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "activetrack/errors.h"
#include "activetrack/estimation.h"
#include "activetrack/rng.h"
#include "oracles/oracles.h"

namespace activetrack {
namespace {

Eigen::MatrixXd Diag(double a, double b) {
  return Eigen::Vector2d(a, b).asDiagonal();
}

Eigen::MatrixXd RandomSpd(Rng& rng, double scale) {
  Eigen::MatrixXd m(2, 2);
  for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = rng.Uniform(-1, 1) * scale;
  return m * m.transpose() + 1e-3 * Eigen::MatrixXd::Identity(2, 2);
}

oracle::M2 ToM2(const Eigen::MatrixXd& m) {
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

void ExpectSymmetricPsd(const Eigen::MatrixXd& s) {
  EXPECT_LE((s - s.transpose()).cwiseAbs().maxCoeff(), 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
}

Belief Make(double x, double y, const Eigen::MatrixXd& s) {
  return {Eigen::Vector2d(x, y), s, TrackStatus::kTracked};
}

TEST(KfPredictTest, Examples) {
  const Belief b = Make(1, 2, Diag(1, 1));
  const Belief p = KfPredict(b, Eigen::MatrixXd::Identity(2, 2), Diag(90, 40));
  EXPECT_EQ(p.sigma, Diag(91, 41));
  EXPECT_EQ(p.mu, b.mu);
  const Belief q = KfPredict(b, Eigen::MatrixXd::Identity(2, 2),
                             Eigen::MatrixXd::Zero(2, 2));
  EXPECT_EQ(q.mu, b.mu);
  EXPECT_EQ(q.sigma, b.sigma);
}

TEST(KfPredictTest, MatchesDenseOracle) {
  CounterRng rng(1);
  for (int k = 0; k < 1000; ++k) {
    Eigen::MatrixXd A(2, 2);
    for (int i = 0; i < 4; ++i) A(i / 2, i % 2) = rng.Uniform(-2, 2);
    const Belief b = Make(rng.Uniform(-5, 5), rng.Uniform(-5, 5), RandomSpd(rng, 3));
    const Eigen::MatrixXd Q = RandomSpd(rng, 2);
    const Belief p = KfPredict(b, A, Q);
    const oracle::Gaussian2 o = oracle::Predict(
        {{b.mu[0], b.mu[1]}, ToM2(b.sigma)}, ToM2(A), ToM2(Q));
    EXPECT_NEAR(p.mu[0], o.mu[0], 1e-12);
    EXPECT_NEAR(p.mu[1], o.mu[1], 1e-12);
    const double scale = std::max(1.0, p.sigma.cwiseAbs().maxCoeff());
    EXPECT_NEAR(p.sigma(0, 0), o.sigma.a, 1e-12 * scale);
    EXPECT_NEAR(p.sigma(0, 1), 0.5 * (o.sigma.b + o.sigma.c), 1e-12 * scale);
    EXPECT_NEAR(p.sigma(1, 1), o.sigma.d, 1e-12 * scale);
    EXPECT_EQ(p.sigma, p.sigma.transpose());
  }
}

TEST(KfUpdateTest, ScalarFilterExample) {
  const Belief b = Make(0, 0, Diag(1, 1));
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
  const Belief u = KfUpdate(b, Eigen::Vector2d(1, 0), H, Diag(0.0025, 0.0025));
  // Per-axis K = 1 / 1.0025.
  EXPECT_NEAR(u.mu[0], 1.0 / 1.0025, 1e-12);
  EXPECT_NEAR(u.mu[0], 0.997506, 1e-6);
  EXPECT_NEAR(u.mu[1], 0.0, 1e-15);
  EXPECT_NEAR(u.sigma(0, 0), 0.0025 / 1.0025, 1e-12);
  EXPECT_NEAR(u.sigma(0, 0), 0.00249377, 1e-8);
}

TEST(KfUpdateTest, ZeroInnovationShrinksCovariance) {
  const Belief b = Make(2, -1, Diag(3, 2));
  const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(2, 2);
  const Belief u = KfUpdate(b, b.mu, H, Diag(0.25, 0.25));
  EXPECT_NEAR((u.mu - b.mu).norm(), 0.0, 1e-15);
  EXPECT_LT(LogDet(u.sigma), LogDet(b.sigma));
}

TEST(KfUpdateTest, ZeroCovarianceIsUnchanged) {
  const Belief b = Make(2, -1, Eigen::MatrixXd::Zero(2, 2));
  const Belief u = KfUpdate(b, Eigen::Vector2d(4, 4), Eigen::MatrixXd::Identity(2, 2),
                            Diag(0.25, 0.25));
  EXPECT_EQ(u.mu, b.mu);
  EXPECT_EQ(u.sigma, b.sigma);
}

TEST(KfUpdateTest, SingularInnovationThrows) {
  const Belief b = Make(0, 0, Eigen::MatrixXd::Zero(2, 2));
  EXPECT_THROW(KfUpdate(b, Eigen::Vector2d(1, 1), Eigen::MatrixXd::Identity(2, 2),
                        Eigen::MatrixXd::Zero(2, 2)),
               SingularInnovation);
}

TEST(KfUpdateTest, MatchesGainFormOracleAndStaysPsd) {
  CounterRng rng(2);
  for (int k = 0; k < 1000; ++k) {
    Eigen::MatrixXd H(2, 2);
    for (int i = 0; i < 4; ++i) H(i / 2, i % 2) = rng.Uniform(-2, 2);
    const Belief b = Make(rng.Uniform(-5, 5), rng.Uniform(-5, 5), RandomSpd(rng, 3));
    const Eigen::MatrixXd R = RandomSpd(rng, 1);
    const Eigen::Vector2d z(rng.Uniform(-5, 5), rng.Uniform(-5, 5));
    const Belief u = KfUpdate(b, z, H, R);
    const oracle::Gaussian2 o = oracle::Update(
        {{b.mu[0], b.mu[1]}, ToM2(b.sigma)}, {z[0], z[1]}, ToM2(H), ToM2(R));
    EXPECT_NEAR(u.mu[0], o.mu[0], 1e-9);
    EXPECT_NEAR(u.mu[1], o.mu[1], 1e-9);
    EXPECT_NEAR(u.sigma(0, 0), o.sigma.a, 1e-9);
    EXPECT_NEAR(u.sigma(0, 1), o.sigma.b, 1e-9);
    EXPECT_NEAR(u.sigma(1, 1), o.sigma.d, 1e-9);
    ExpectSymmetricPsd(u.sigma);
    EXPECT_LE(LogDet(u.sigma), LogDet(b.sigma) + 1e-12);
  }
}

TEST(LogDetTest, Examples) {
  EXPECT_DOUBLE_EQ(LogDet(Eigen::MatrixXd::Identity(2, 2)), 0.0);
  EXPECT_NEAR(LogDet(Diag(std::numbers::e, std::numbers::e)), 2.0, 1e-15);
  EXPECT_EQ(LogDet(Eigen::MatrixXd::Zero(2, 2)), kLogDetFloor);
  // The factorization keeps tiny determinants finite.
  EXPECT_NEAR(LogDet(Diag(1e-200, 1e-200)), -400 * std::log(10.0), 1e-9);
}

TEST(LogDetTest, MatchesTwoByTwoFormula) {
  CounterRng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::MatrixXd s = RandomSpd(rng, 2);
    const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(0, 1);
    EXPECT_NEAR(LogDet(s), std::log(det), 1e-9);
  }
}

TEST(LogDetTest, GrowsUnderRepeatedPredict) {
  Belief b = Make(0, 0, Diag(0.25, 0.25));
  double last = LogDet(b.sigma);
  for (int i = 0; i < 50; ++i) {
    b = KfPredict(b, Eigen::MatrixXd::Identity(2, 2), Diag(90, 40));
    const double now = LogDet(b.sigma);
    EXPECT_GT(now, last);
    last = now;
  }
}

TEST(UndetectedBeliefTest, Examples) {
  const Eigen::MatrixXd sb = Diag(std::exp(10.0), std::exp(10.0));
  const Belief a = UndetectedBelief(sb);
  EXPECT_NEAR(LogDet(a.sigma), 20.0, 1e-12);
  EXPECT_EQ(a.status, TrackStatus::kUndetected);
  EXPECT_EQ(a.mu, Eigen::Vector2d::Zero().eval());
  const Belief b = UndetectedBelief(sb);
  EXPECT_EQ(a.mu, b.mu);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_THROW(UndetectedBelief(Eigen::MatrixXd::Identity(2, 2)), InvalidConfig);
}

TEST(SigmaBarTest, CoversMapDiagonal) {
  const OccupancyGrid g(200, 200, 0.1);
  const Eigen::MatrixXd sb = DefaultSigmaBar(g);
  // 2 sigma = map diagonal.
  EXPECT_NEAR(2 * std::sqrt(sb(0, 0)), g.Diagonal(), 1e-12);
  EXPECT_GT(LogDet(DefaultSigmaBar(OccupancyGrid(2, 2, 0.1))), 1.0);
}

FilterBank DefaultBank() {
  return FilterBank(FilterModel::Default(), Diag(200, 200), Diag(0.25, 0.25));
}

TEST(ProcessStepTest, Examples) {
  const OccupancyGrid g(200, 200, 0.1);
  const AgentPose pose{10, 10, 0};
  const FieldOfView fov;

  FilterBank bank = DefaultBank();
  bank.ProcessStep(std::vector<Measurement>{{1, Eigen::Vector2d(12, 10)}}, pose, g, fov);
  bank.ProcessStep(std::vector<Measurement>{{1, Eigen::Vector2d(12, 10)},
                                            {2, Eigen::Vector2d(11, 10)}},
                   pose, g, fov);
  EXPECT_EQ(bank.detected(), (std::set<int>{1, 2}));

  // Id 1 predicted inside the FoV but not measured: Lost.
  bank.ProcessStep(std::vector<Measurement>{{2, Eigen::Vector2d(11, 10)}}, pose, g, fov);
  EXPECT_EQ(bank.detected(), (std::set<int>{2}));
  EXPECT_EQ(bank.beliefs().at(1).status, TrackStatus::kLost);

  // Nothing measured, no mean in view: set unchanged, covariances grow by Q.
  FilterBank far = DefaultBank();
  far.ProcessStep(std::vector<Measurement>{{5, Eigen::Vector2d(12, 10)}}, pose, g, fov);
  const Eigen::MatrixXd before = far.beliefs().at(5).sigma;
  far.ProcessStep({}, {2, 2, 0}, g, fov);
  EXPECT_EQ(far.detected(), (std::set<int>{5}));
  EXPECT_EQ(far.beliefs().at(5).sigma, before + Diag(90, 40));
}

TEST(ProcessStepTest, NewTargetUsesLiftAndInitCovariance) {
  const OccupancyGrid g(200, 200, 0.1);
  FilterBank bank = DefaultBank();
  bank.ProcessStep(std::vector<Measurement>{{3, Eigen::Vector2d(7, 8)}},
                   {10, 10, 0}, g, FieldOfView{});
  const Belief& b = bank.beliefs().at(3);
  EXPECT_NEAR((b.mu - Eigen::Vector2d(7, 8)).norm(), 0.0, 1e-12);
  EXPECT_EQ(b.sigma, Diag(0.25, 0.25));
  EXPECT_EQ(b.status, TrackStatus::kTracked);
}

TEST(ProcessStepTest, LostTargetResumesWithoutReinitialization) {
  const OccupancyGrid g(200, 200, 0.1);
  const FieldOfView fov;
  FilterBank bank = DefaultBank();
  const AgentPose near{10, 10, 0};
  bank.ProcessStep(std::vector<Measurement>{{1, Eigen::Vector2d(12, 10)}}, near, g, fov);
  Belief expected = bank.beliefs().at(1);
  bank.ProcessStep({}, near, g, fov);  // goes Lost
  ASSERT_EQ(bank.beliefs().at(1).status, TrackStatus::kLost);
  const FilterModel m = FilterModel::Default();
  expected = KfPredict(expected, m.A, m.Q);
  for (int k = 0; k < 4; ++k) {
    bank.ProcessStep({}, near, g, fov);
    expected = KfPredict(expected, m.A, m.Q);
  }
  const Eigen::Vector2d z(12.3, 10.1);
  bank.ProcessStep(std::vector<Measurement>{{1, z}}, near, g, fov);
  expected = KfUpdate(KfPredict(expected, m.A, m.Q), z, m.H, m.R);
  const Belief& got = bank.beliefs().at(1);
  EXPECT_EQ(got.mu, expected.mu);
  EXPECT_EQ(got.sigma, expected.sigma);
  EXPECT_EQ(got.status, TrackStatus::kTracked);
  EXPECT_TRUE(bank.detected().contains(1));
}

TEST(ProcessStepTest, RecurrenceMatchesBruteForceSets) {
  CounterRng rng(4);
  const OccupancyGrid g(100, 100, 0.1);
  const FieldOfView fov{3.0, std::numbers::pi / 3};
  FilterBank bank = DefaultBank();
  for (int step = 0; step < 1000; ++step) {
    const AgentPose pose{rng.Uniform(0, 10), rng.Uniform(0, 10),
                         rng.Uniform(-std::numbers::pi, std::numbers::pi)};
    std::vector<Measurement> z;
    std::set<int> measured;
    for (int id = 0; id < 8; ++id) {
      if (rng.Uniform() < 0.3) {
        z.push_back({id, Eigen::Vector2d(rng.Uniform(0, 10), rng.Uniform(0, 10))});
        measured.insert(id);
      }
    }
    const std::set<int> previous = bank.detected();
    const FilterModel m = bank.model();
    std::set<int> lost;
    for (int id : previous) {
      if (measured.contains(id)) continue;
      const Belief p = KfPredict(bank.beliefs().at(id), m.A, m.Q);
      if (oracle::InFov(pose, p.position(), g, fov.radius, fov.half_angle)) {
        lost.insert(id);
      }
    }
    bank.ProcessStep(z, pose, g, fov);
    ASSERT_EQ(bank.detected(), oracle::DetectedRecurrence(previous, measured, lost))
        << "step " << step;
    for (int id : bank.detected()) {
      ASSERT_NE(bank.beliefs().at(id).status, TrackStatus::kUndetected);
      ASSERT_TRUE(bank.beliefs().contains(id));
    }
    for (const auto& [id, b] : bank.beliefs()) ExpectSymmetricPsd(b.sigma);
  }
}

TEST(FilterBankTest, RejectsSmallSigmaBar) {
  EXPECT_THROW(FilterBank(FilterModel::Default(), Eigen::MatrixXd::Identity(2, 2),
                          Diag(0.25, 0.25)),
               InvalidConfig);
}

TEST(FilterBankTest, PlaceholderForUnknownIds) {
  const FilterBank bank = DefaultBank();
  const Belief b = bank.BeliefOrPlaceholder(42);
  EXPECT_EQ(b.status, TrackStatus::kUndetected);
  EXPECT_EQ(b.sigma, Diag(200, 200));
}

}  // namespace
}  // namespace activetrack
