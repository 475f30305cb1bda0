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

#include "activetrack/world.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "activetrack/errors.h"

namespace activetrack {

double WrapAngle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle + std::numbers::pi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  a -= std::numbers::pi;
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

namespace {

bool IsPsd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().minCoeff() >= -1e-9;
}

}  // namespace

void SimConfig::Validate() const {
  if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
  if (episode_length <= 0) throw InvalidConfig("episode_length must be > 0");
  if (!(v_max >= 0.0) || !(omega_max >= 0.0)) {
    throw InvalidConfig("command limits must be non-negative");
  }
  if (!(fov.radius > 0.0) || !(fov.half_angle > 0.0) ||
      fov.half_angle > std::numbers::pi) {
    throw InvalidConfig("field of view needs radius > 0, half_angle in (0, pi]");
  }
  const auto n = target_A.rows();
  if (n < 2 || target_A.cols() != n || target_W.rows() != n ||
      target_W.cols() != n) {
    throw InvalidConfig("target model matrices must be n_y x n_y, n_y >= 2");
  }
  if (sensor_H.cols() != n || sensor_R.rows() != sensor_H.rows() ||
      sensor_R.cols() != sensor_H.rows()) {
    throw InvalidConfig("sensor matrices have inconsistent shapes");
  }
  if (!IsPsd(target_W)) throw InvalidConfig("W must be symmetric PSD");
  if (!IsPsd(sensor_R)) throw InvalidConfig("R must be symmetric PSD");
}

Eigen::MatrixXd PsdSqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd roots =
      solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal();
}

AgentCommand ClampCommand(const AgentCommand& cmd, double v_max,
                          double omega_max) {
  return {std::clamp(cmd.v, 0.0, v_max),
          std::clamp(cmd.omega, -omega_max, omega_max)};
}

AgentPose StepAgent(const AgentPose& pose, const AgentCommand& cmd, double dt,
                    const OccupancyGrid& grid) {
  AgentPose next = pose;
  next.theta = WrapAngle(pose.theta + cmd.omega * dt);
  const Vec2 from = pose.position();
  const Vec2 to{pose.x + cmd.v * std::cos(pose.theta) * dt,
                pose.y + cmd.v * std::sin(pose.theta) * dt};
  if (grid.IsFree(grid.CellOf(to)) && SegmentFree(grid, from, to)) {
    next.x = to.x();
    next.y = to.y();
  }
  return next;
}

std::vector<TargetState> StepTargets(std::span<const TargetState> targets,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& W, double dt,
                                     const OccupancyGrid& grid, Rng& rng) {
  std::vector<TargetState> sorted(targets.begin(), targets.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const TargetState& a, const TargetState& b) {
              return a.id < b.id;
            });
  const Eigen::MatrixXd factor = PsdSqrt(W * dt);
  const auto n = A.rows();
  for (TargetState& target : sorted) {
    const Eigen::VectorXd mean = A * target.state;
    for (int attempt = 0; attempt <= kTargetRetries; ++attempt) {
      Eigen::VectorXd noise(n);
      for (Eigen::Index i = 0; i < n; ++i) noise[i] = rng.Normal();
      Eigen::VectorXd candidate = mean + factor * noise;
      if (grid.IsFree(grid.CellOf(candidate.head<2>()))) {
        target.state = std::move(candidate);
        break;
      }
    }
  }
  return sorted;
}

bool InFov(const AgentPose& pose, const Vec2& point, const OccupancyGrid& grid,
           const FieldOfView& fov) {
  if (!grid.Contains(point)) return false;
  const Vec2 delta = point - pose.position();
  const double range = delta.norm();
  if (range > fov.radius) return false;
  if (range > 0.0) {
    const double bearing = std::atan2(delta.y(), delta.x());
    if (std::abs(WrapAngle(bearing - pose.theta)) > fov.half_angle) {
      return false;
    }
  }
  return LineOfSight(grid, pose.position(), point);
}

std::vector<Measurement> Sense(const AgentPose& pose,
                               std::span<const TargetState> targets,
                               const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& R,
                               const OccupancyGrid& grid,
                               const FieldOfView& fov, Rng& rng) {
  std::vector<const TargetState*> order;
  order.reserve(targets.size());
  for (const TargetState& t : targets) order.push_back(&t);
  std::sort(order.begin(), order.end(),
            [](const TargetState* a, const TargetState* b) {
              return a->id < b->id;
            });
  const Eigen::MatrixXd factor = PsdSqrt(R);
  std::vector<Measurement> out;
  for (const TargetState* target : order) {
    if (!InFov(pose, target->position(), grid, fov)) continue;
    Eigen::VectorXd noise(H.rows());
    for (Eigen::Index i = 0; i < H.rows(); ++i) noise[i] = rng.Normal();
    out.push_back({target->id, H * target->state + factor * noise});
  }
  return out;
}

void UpdateExplored(OccupancyGrid& grid, const AgentPose& pose,
                    const FieldOfView& fov) {
  const Cell own = grid.CellOf(pose.position());
  if (grid.InBounds(own)) grid.MarkExplored(own);
  const double res = grid.resolution();
  const int r0 = std::max(0, static_cast<int>((pose.x - fov.radius) / res) - 1);
  const int r1 = std::min(grid.height() - 1,
                          static_cast<int>((pose.x + fov.radius) / res) + 1);
  const int c0 = std::max(0, static_cast<int>((pose.y - fov.radius) / res) - 1);
  const int c1 = std::min(grid.width() - 1,
                          static_cast<int>((pose.y + fov.radius) / res) + 1);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const Cell cell{r, c};
      if (grid.IsExplored(cell)) continue;
      if (InFov(pose, grid.CellCenter(cell), grid, fov)) grid.MarkExplored(cell);
    }
  }
}

EgoMap EgocentricCrop(const OccupancyGrid& grid, const AgentPose& pose,
                      int size) {
  EgoMap out;
  out.size = size;
  out.cells.resize(static_cast<std::size_t>(size) * size);
  const double res = grid.resolution();
  const double cos_t = std::cos(pose.theta);
  const double sin_t = std::sin(pose.theta);
  const int half = size / 2;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double forward = (r - half) * res;
      const double lateral = (c - half) * res;
      const Vec2 p{pose.x + cos_t * forward - sin_t * lateral,
                   pose.y + sin_t * forward + cos_t * lateral};
      const Cell cell = grid.CellOf(p);
      EgoCell value;
      if (!grid.InBounds(cell)) {
        value = EgoCell::kOccupied;
      } else if (!grid.IsExplored(cell)) {
        value = EgoCell::kUnknown;
      } else {
        value = grid.IsOccupied(cell) ? EgoCell::kOccupied : EgoCell::kFree;
      }
      out.cells[r * size + c] = static_cast<std::uint8_t>(value);
    }
  }
  return out;
}

}  // namespace activetrack
