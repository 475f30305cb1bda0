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

#ifndef ACTIVETRACK_WORLD_H_
#define ACTIVETRACK_WORLD_H_

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "activetrack/grid.h"
#include "activetrack/rng.h"

namespace activetrack {

// Wraps an angle to (-pi, pi].
double WrapAngle(double angle);

struct AgentPose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

struct AgentCommand {
  double v = 0.0;
  double omega = 0.0;
  friend bool operator==(const AgentCommand&, const AgentCommand&) = default;
};

struct TargetState {
  int id = 0;
  // Position components first.
  Eigen::VectorXd state;

  Vec2 position() const { return state.head<2>(); }
};

struct FieldOfView {
  double radius = 5.0;
  double half_angle = std::numbers::pi / 3.0;
  friend bool operator==(const FieldOfView&, const FieldOfView&) = default;
};

struct SimConfig {
  double dt = 0.5;
  double v_max = 1.0;
  double omega_max = 1.0;
  FieldOfView fov;
  // True target dynamics y' = A y + w, w ~ N(0, W dt).
  Eigen::MatrixXd target_A = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd target_W = Eigen::MatrixXd::Identity(2, 2);
  // True sensor z = H y + eta, eta ~ N(0, R).
  Eigen::MatrixXd sensor_H = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd sensor_R = 0.0025 * Eigen::MatrixXd::Identity(2, 2);
  int episode_length = 400;
  std::uint64_t seed = 0;

  // Throws InvalidConfig when an invariant does not hold.
  void Validate() const;
};

struct Measurement {
  int id = 0;
  Eigen::VectorXd z;
};

// Symmetric square root factor L with L L^T = m for a PSD matrix m.
Eigen::MatrixXd PsdSqrt(const Eigen::MatrixXd& m);

// Clamps a command to the configured limits.
AgentCommand ClampCommand(const AgentCommand& cmd, double v_max,
                          double omega_max);

// Euler step of the unicycle model. If the straight move crosses an Occupied
// or out-of-bounds cell the position is kept and only the heading changes.
AgentPose StepAgent(const AgentPose& pose, const AgentCommand& cmd, double dt,
                    const OccupancyGrid& grid);

// Advances every target by one step of y' = A y + w, w ~ N(0, W dt). Draws
// are taken in ascending id order; a draw that puts the position into an
// Occupied or out-of-bounds cell is rejected and redrawn up to
// kTargetRetries times, after which the target keeps its state.
inline constexpr int kTargetRetries = 8;
std::vector<TargetState> StepTargets(std::span<const TargetState> targets,
                                     const Eigen::MatrixXd& A,
                                     const Eigen::MatrixXd& W, double dt,
                                     const OccupancyGrid& grid, Rng& rng);

// Sector test with range, half-angle and grid line of sight.
bool InFov(const AgentPose& pose, const Vec2& point, const OccupancyGrid& grid,
           const FieldOfView& fov);

// One noisy measurement per target whose true position is in the field of
// view, in ascending id order.
std::vector<Measurement> Sense(const AgentPose& pose,
                               std::span<const TargetState> targets,
                               const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& R,
                               const OccupancyGrid& grid,
                               const FieldOfView& fov, Rng& rng);

// Marks every cell whose center is in the field of view as explored, plus the
// agent's own cell.
void UpdateExplored(OccupancyGrid& grid, const AgentPose& pose,
                    const FieldOfView& fov);

enum class EgoCell : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };

struct EgoMap {
  int size = 0;
  // Row-major size x size values of EgoCell.
  std::vector<std::uint8_t> cells;

  std::uint8_t at(int row, int col) const { return cells[row * size + col]; }
  friend bool operator==(const EgoMap&, const EgoMap&) = default;
};

// Agent-centered crop: output cell (r, c) samples the global cell under the
// point pose + R(theta) * ((r - size/2), (c - size/2)) * resolution, so the
// agent sits in cell (size/2, size/2) facing +row. Out-of-map samples are
// Occupied, unexplored in-map samples Unknown.
EgoMap EgocentricCrop(const OccupancyGrid& grid, const AgentPose& pose,
                      int size);

}  // namespace activetrack

#endif  // ACTIVETRACK_WORLD_H_
