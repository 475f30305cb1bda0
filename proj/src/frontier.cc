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

#include "activetrack/frontier.h"

#include <cmath>
#include <deque>
#include <limits>

#include "activetrack/errors.h"

namespace activetrack {

namespace {

constexpr Cell kNeighbors4[] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};

bool IsUnexploredFree(const OccupancyGrid& grid, Cell c) {
  return grid.IsFree(c) && !grid.IsExplored(c);
}

// Largest dc >= 0 with dr^2 + dc^2 <= limit2, or -1 when |dr| is too large.
int HalfWidth(int dr, double limit2) {
  const double rest = limit2 - static_cast<double>(dr) * dr;
  if (rest < 0.0) return -1;
  int dc = static_cast<int>(std::sqrt(rest));
  while (static_cast<double>(dc + 1) * (dc + 1) <= rest) ++dc;
  while (dc > 0 && static_cast<double>(dc) * dc > rest) --dc;
  return dc;
}

// Row-wise prefix sums of the unexplored-Free indicator, for O(radius) gain
// queries.
class GainTable {
 public:
  explicit GainTable(const OccupancyGrid& grid)
      : width_(grid.width()), height_(grid.height()) {
    prefix_.assign(static_cast<std::size_t>(height_) * (width_ + 1), 0);
    for (int r = 0; r < height_; ++r) {
      int* row = &prefix_[static_cast<std::size_t>(r) * (width_ + 1)];
      for (int c = 0; c < width_; ++c) {
        row[c + 1] = row[c] + (IsUnexploredFree(grid, {r, c}) ? 1 : 0);
      }
    }
  }

  int Count(Cell center, double radius_cells) const {
    const double limit2 = radius_cells * radius_cells;
    const int reach = static_cast<int>(std::floor(radius_cells));
    int total = 0;
    for (int dr = -reach; dr <= reach; ++dr) {
      const int r = center.row + dr;
      if (r < 0 || r >= height_) continue;
      const int half = HalfWidth(dr, limit2);
      if (half < 0) continue;
      const int c0 = std::max(0, center.col - half);
      const int c1 = std::min(width_ - 1, center.col + half);
      if (c0 > c1) continue;
      const int* row = &prefix_[static_cast<std::size_t>(r) * (width_ + 1)];
      total += row[c1 + 1] - row[c0];
    }
    return total;
  }

 private:
  int width_;
  int height_;
  std::vector<int> prefix_;
};

}  // namespace

FrontierWeights FrontierWeights::ForResolution(double resolution) {
  return {1.0, 2.0 * resolution, 0.1 * resolution};
}

void FrontierWeights::Validate() const {
  if (w_dist < 0 || w_visit < 0 || w_gain < 0 ||
      (w_dist == 0 && w_visit == 0 && w_gain == 0)) {
    throw InvalidConfig("frontier weights must be >= 0 with one > 0");
  }
}

std::vector<Cell> ExtractFrontiers(const OccupancyGrid& grid) {
  std::vector<Cell> out;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      const Cell cell{r, c};
      if (!grid.IsFree(cell) || !grid.IsExplored(cell)) continue;
      for (Cell d : kNeighbors4) {
        if (IsUnexploredFree(grid, {r + d.row, c + d.col})) {
          out.push_back(cell);
          break;
        }
      }
    }
  }
  return out;
}

std::vector<int> BfsDistances(const OccupancyGrid& grid, Cell start) {
  std::vector<int> dist(grid.size(), -1);
  if (!grid.IsFree(start)) return dist;
  std::deque<Cell> queue{start};
  dist[grid.Index(start)] = 0;
  while (!queue.empty()) {
    const Cell cur = queue.front();
    queue.pop_front();
    const int next_dist = dist[grid.Index(cur)] + 1;
    for (Cell d : kNeighbors4) {
      const Cell n{cur.row + d.row, cur.col + d.col};
      if (!grid.IsFree(n) || dist[grid.Index(n)] >= 0) continue;
      dist[grid.Index(n)] = next_dist;
      queue.push_back(n);
    }
  }
  return dist;
}

int ExpectedGain(const OccupancyGrid& grid, Cell cell, double radius) {
  const double radius_cells = radius / grid.resolution();
  const double limit2 = radius_cells * radius_cells;
  const int reach = static_cast<int>(std::floor(radius_cells));
  int total = 0;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (static_cast<double>(dr) * dr + static_cast<double>(dc) * dc > limit2) {
        continue;
      }
      if (IsUnexploredFree(grid, {cell.row + dr, cell.col + dc})) ++total;
    }
  }
  return total;
}

double ScoreFrontier(Cell p, const AgentPose& pose, const VisitCounts& visits,
                     const OccupancyGrid& grid, const FrontierWeights& weights,
                     double gain_radius) {
  const std::vector<int> dist = BfsDistances(grid, grid.CellOf(pose.position()));
  if (!grid.InBounds(p) || dist[grid.Index(p)] < 0) {
    throw UnreachableFrontier("frontier (" + std::to_string(p.row) + ", " +
                              std::to_string(p.col) + ") is unreachable");
  }
  return weights.w_dist * dist[grid.Index(p)] * grid.resolution() +
         weights.w_visit * visits[grid.Index(p)] -
         weights.w_gain * ExpectedGain(grid, p, gain_radius);
}

Cell SelectFrontier(std::span<const Cell> frontiers, const AgentPose& pose,
                    const VisitCounts& visits, const OccupancyGrid& grid,
                    const FrontierWeights& weights, double gain_radius) {
  const Cell own = grid.CellOf(pose.position());
  const std::vector<int> dist = BfsDistances(grid, own);
  const GainTable gains(grid);
  const double radius_cells = gain_radius / grid.resolution();

  bool found = false;
  double best_score = std::numeric_limits<double>::infinity();
  int best_index = std::numeric_limits<int>::max();
  for (Cell p : frontiers) {
    if (!grid.InBounds(p)) continue;
    const int index = grid.Index(p);
    if (dist[index] < 0) continue;
    const double score = weights.w_dist * dist[index] * grid.resolution() +
                         weights.w_visit * visits[index] -
                         weights.w_gain * gains.Count(p, radius_cells);
    if (!found || score < best_score ||
        (score == best_score && index < best_index)) {
      found = true;
      best_score = score;
      best_index = index;
    }
  }
  if (found) return grid.CellAt(best_index);

  // Fully explored (or nothing reachable): revisit the least-visited cell.
  const int own_index = grid.InBounds(own) ? grid.Index(own) : -1;
  int best_visits = std::numeric_limits<int>::max();
  for (int index = 0; index < grid.size(); ++index) {
    if (dist[index] < 0 || index == own_index) continue;
    if (visits[index] < best_visits) {
      best_visits = visits[index];
      best_index = index;
    }
  }
  if (best_visits == std::numeric_limits<int>::max()) {
    throw NoReachableGoal("no reachable free cell to explore");
  }
  return grid.CellAt(best_index);
}

}  // namespace activetrack
