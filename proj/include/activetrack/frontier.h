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

#ifndef ACTIVETRACK_FRONTIER_H_
#define ACTIVETRACK_FRONTIER_H_

#include <span>
#include <vector>

#include "activetrack/grid.h"
#include "activetrack/world.h"

namespace activetrack {

// Per-cell visit counters, indexed by OccupancyGrid::Index.
using VisitCounts = std::vector<int>;

struct FrontierWeights {
  double w_dist = 1.0;
  double w_visit = 0.2;
  double w_gain = 0.01;

  // w_dist = 1, w_visit = 2 * resolution, w_gain = 0.1 * resolution.
  static FrontierWeights ForResolution(double resolution);
  void Validate() const;
};

// Free explored cells with at least one 4-connected Free unexplored
// neighbor, in row-major order.
std::vector<Cell> ExtractFrontiers(const OccupancyGrid& grid);

// 4-connected BFS step counts through Free cells from `start`; -1 marks
// unreachable cells (and every cell when `start` itself is not Free).
std::vector<int> BfsDistances(const OccupancyGrid& grid, Cell start);

// Number of unexplored Free cells whose centers lie within `radius` meters of
// the center of `cell`.
int ExpectedGain(const OccupancyGrid& grid, Cell cell, double radius);

// S(p) = w_dist * dist + w_visit * visits(p) - w_gain * gain(p), with dist the
// BFS path length in meters from the agent's cell and gain measured within
// `gain_radius`. Throws UnreachableFrontier when BFS cannot reach p.
double ScoreFrontier(Cell p, const AgentPose& pose, const VisitCounts& visits,
                     const OccupancyGrid& grid, const FrontierWeights& weights,
                     double gain_radius);

// Argmin of ScoreFrontier over the reachable frontiers, ties to the smallest
// row-major index. With no reachable frontier, the least-visited reachable
// Free cell other than the agent's own is returned. Throws NoReachableGoal.
Cell SelectFrontier(std::span<const Cell> frontiers, const AgentPose& pose,
                    const VisitCounts& visits, const OccupancyGrid& grid,
                    const FrontierWeights& weights, double gain_radius);

}  // namespace activetrack

#endif  // ACTIVETRACK_FRONTIER_H_
