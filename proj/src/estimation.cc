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

#include "activetrack/estimation.h"

#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "activetrack/errors.h"

namespace activetrack {

FilterModel FilterModel::Default() {
  FilterModel m;
  m.A = Eigen::MatrixXd::Identity(2, 2);
  m.Q = Eigen::Vector2d(90.0, 40.0).asDiagonal();
  m.H = Eigen::MatrixXd::Identity(2, 2);
  m.R = 0.25 * Eigen::MatrixXd::Identity(2, 2);
  return m;
}

double LogDet(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  double result;
  if (llt.info() == Eigen::Success) {
    result = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    const Eigen::VectorXd ev = solver.eigenvalues();
    if (ev.minCoeff() <= 0.0) return kLogDetFloor;
    result = ev.array().log().sum();
  }
  return std::isfinite(result) ? result : kLogDetFloor;
}

Belief KfPredict(const Belief& belief, const Eigen::MatrixXd& A,
                 const Eigen::MatrixXd& Q) {
  Belief out = belief;
  out.mu = A * belief.mu;
  const Eigen::MatrixXd s = A * belief.sigma * A.transpose() + Q;
  out.sigma = 0.5 * (s + s.transpose());
  return out;
}

Belief KfUpdate(const Belief& belief, const Eigen::VectorXd& z,
                const Eigen::MatrixXd& H, const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd& sigma = belief.sigma;
  Eigen::MatrixXd s = H * sigma * H.transpose() + R;
  s = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.eigenvalues().minCoeff() <= 1e-12) {
    throw SingularInnovation("innovation covariance is numerically singular");
  }
  // K = sigma H^T S^-1, solved as S K^T = H sigma.
  const Eigen::MatrixXd gain =
      s.ldlt().solve(H * sigma).transpose();
  Belief out = belief;
  out.mu = belief.mu + gain * (z - H * belief.mu);
  const auto n = sigma.rows();
  const Eigen::MatrixXd i_kh = Eigen::MatrixXd::Identity(n, n) - gain * H;
  const Eigen::MatrixXd joseph =
      i_kh * sigma * i_kh.transpose() + gain * R * gain.transpose();
  out.sigma = 0.5 * (joseph + joseph.transpose());
  return out;
}

Belief UndetectedBelief(const Eigen::MatrixXd& sigma_bar) {
  if (!(LogDet(sigma_bar) > 1.0)) {
    throw InvalidConfig("sigma_bar must have log det > 1");
  }
  Belief b;
  b.mu = Eigen::VectorXd::Zero(sigma_bar.rows());
  b.sigma = sigma_bar;
  b.status = TrackStatus::kUndetected;
  return b;
}

Eigen::MatrixXd DefaultSigmaBar(const OccupancyGrid& grid, int n_y) {
  const double half = grid.Diagonal() / 2.0;
  const double s = std::max(half * half, std::numbers::e);
  return s * Eigen::MatrixXd::Identity(n_y, n_y);
}

FilterBank::FilterBank(FilterModel model, Eigen::MatrixXd sigma_bar,
                       Eigen::MatrixXd init_sigma)
    : model_(std::move(model)),
      sigma_bar_(std::move(sigma_bar)),
      init_sigma_(std::move(init_sigma)) {
  if (!(LogDet(sigma_bar_) > 1.0)) {
    throw InvalidConfig("sigma_bar must have log det > 1");
  }
  lift_ = model_.H.completeOrthogonalDecomposition().pseudoInverse();
}

Belief FilterBank::BeliefOrPlaceholder(int id) const {
  auto it = beliefs_.find(id);
  if (it != beliefs_.end()) return it->second;
  return UndetectedBelief(sigma_bar_);
}

void FilterBank::ProcessStep(std::span<const Measurement> measurements,
                             const AgentPose& pose, const OccupancyGrid& grid,
                             const FieldOfView& fov) {
  for (auto& [id, belief] : beliefs_) {
    belief = KfPredict(belief, model_.A, model_.Q);
  }
  std::set<int> measured;
  for (const Measurement& m : measurements) {
    measured.insert(m.id);
    auto it = beliefs_.find(m.id);
    if (it == beliefs_.end()) {
      Belief fresh;
      fresh.mu = lift_ * m.z;
      fresh.sigma = init_sigma_;
      fresh.status = TrackStatus::kTracked;
      beliefs_.emplace(m.id, std::move(fresh));
    } else {
      it->second = KfUpdate(it->second, m.z, model_.H, model_.R);
      it->second.status = TrackStatus::kTracked;
    }
    detected_.insert(m.id);
  }
  for (auto it = detected_.begin(); it != detected_.end();) {
    Belief& belief = beliefs_.at(*it);
    if (!measured.contains(*it) && InFov(pose, belief.position(), grid, fov)) {
      belief.status = TrackStatus::kLost;
      it = detected_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace activetrack
