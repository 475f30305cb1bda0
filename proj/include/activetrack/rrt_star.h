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

#ifndef ACTIVETRACK_RRT_STAR_H_
#define ACTIVETRACK_RRT_STAR_H_

#include <optional>
#include <vector>

#include "activetrack/grid.h"
#include "activetrack/rng.h"

namespace activetrack {

struct Path {
  std::vector<Vec2> waypoints;
  // Sum of segment lengths in meters.
  double cost = 0.0;

  bool empty() const { return waypoints.empty(); }
};

double PathLength(const std::vector<Vec2>& waypoints);
Path MakePath(std::vector<Vec2> waypoints);

struct RrtParams {
  int max_iterations = 4000;
  double step_size = 0.5;      // meters
  double rewire_radius = 1.0;  // meters
  double goal_bias = 0.1;
  int safety_margin = 2;        // cells
  double goal_tolerance = 0.2;  // meters

  // step 5 cells, rewire 10 cells, tolerance 2 cells, margin 2 cells.
  static RrtParams ForResolution(double resolution);
  void Validate() const;
};

// A point is admissible when its cell is Free in the inflated grid.
inline bool Admissible(const OccupancyGrid& inflated, const Vec2& p) {
  return inflated.IsFree(inflated.CellOf(p));
}

// True iff every segment of the path is free on `inflated`.
bool PathCollisionFree(const OccupancyGrid& inflated, const Path& path);

// RRT* on an already inflated grid: uniform samples over the map (the goal
// with probability goal_bias), steering by step_size, parent choice and
// rewiring within rewire_radius. Returns the cheapest tree path that ends
// within goal_tolerance of the goal after max_iterations.
// Throws InvalidEndpoint or NoPath.
Path RrtStarInflated(const OccupancyGrid& inflated, const Vec2& start,
                     const Vec2& goal, const RrtParams& params, Rng& rng);

// Inflates `grid` by params.safety_margin and plans on the result.
Path RrtStar(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal,
             const RrtParams& params, Rng& rng);

// Greedy shortcutting on an inflated grid: from each kept waypoint jump to
// the farthest later waypoint reachable by a free straight segment.
Path SmoothPathInflated(const Path& path, const OccupancyGrid& inflated);
Path SmoothPath(const Path& path, const OccupancyGrid& grid, int margin);

// Nearest admissible cell center within `max_cells` of p (p itself when
// already admissible). Ties go to the smallest row-major index.
std::optional<Vec2> SnapToAdmissible(const OccupancyGrid& inflated,
                                     const Vec2& p, int max_cells);

}  // namespace activetrack

#endif  // ACTIVETRACK_RRT_STAR_H_
