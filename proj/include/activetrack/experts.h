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

#ifndef ACTIVETRACK_EXPERTS_H_
#define ACTIVETRACK_EXPERTS_H_

#include <set>
#include <string>

#include "activetrack/estimation.h"
#include "activetrack/frontier.h"
#include "activetrack/rrt_star.h"

namespace activetrack {

struct PlannerMode {
  enum class Kind { kExplore, kTrack };
  Kind kind = Kind::kExplore;
  int target_id = -1;

  static PlannerMode Explore() { return {}; }
  static PlannerMode Track(int id) { return {Kind::kTrack, id}; }
  bool tracking() const { return kind == Kind::kTrack; }
  friend bool operator==(const PlannerMode&, const PlannerMode&) = default;
};

std::string ToString(const PlannerMode& mode);

// Inputs shared by the expert planners over an episode.
struct PlanningContext {
  const OccupancyGrid* grid = nullptr;      // ground truth + explored mask
  OccupancyGrid inflated;                   // obstacles inflated by margin
  VisitCounts visits;
  FrontierWeights weights;
  RrtParams rrt;
  double gain_radius = 5.0;
  // Start and goal points inside the inflation are moved to the nearest
  // admissible cell within this many cells.
  int snap_cells = 4;

  static PlanningContext Make(const OccupancyGrid& grid,
                              const FrontierWeights& weights,
                              const RrtParams& rrt, double gain_radius);
};

// RRT* from the (snapped) pose to the (snapped) goal, then shortcut
// smoothing. Throws InvalidEndpoint or NoPath.
Path PlanToPoint(const AgentPose& pose, const Vec2& goal,
                 PlanningContext& ctx, Rng& rng);

// Frontier selection on the inflated grid, RRT* to the chosen cell and
// smoothing; the visit count of the chosen cell is incremented.
Path PlanFrontier(const AgentPose& pose, PlanningContext& ctx, Rng& rng);

// The branch condition of the uncertainty-based hybrid: Explore when no
// target is detected or every detected log det is <= threshold, otherwise
// Track the detected target of largest log det (smallest id on ties).
PlannerMode DecideUncertaintyMode(const FilterBank& bank, double threshold);

struct HybridPlan {
  PlannerMode mode;
  Path path;
};

// Falls back to exploration when the tracking goal cannot be planned to.
HybridPlan PlanUncertaintyHybrid(const FilterBank& bank, double threshold,
                                 const AgentPose& pose, PlanningContext& ctx,
                                 Rng& rng);

// Countdown state of the time-based hybrid.
struct TrackTimer {
  bool tracking = false;
  int target_id = -1;
  int remaining = 0;
  std::set<int> previous_detected;

  friend bool operator==(const TrackTimer&, const TrackTimer&) = default;
};

// Advances the timer by one step given the current detected set. A fresh
// detection (id entering the detected set) while exploring starts a bout of
// `track_duration` Track steps on the smallest fresh id; the bout ends early
// when its target leaves the detected set. Detections during a bout are
// ignored.
PlannerMode AdvanceTrackTimer(TrackTimer& timer, const std::set<int>& detected,
                              int track_duration);

// Path for the given time-hybrid mode; Track plans to the target's mean.
// The path is empty when the tracking goal cannot be planned to.
Path PlanForTimeHybrid(const PlannerMode& mode, const FilterBank& bank,
                       const AgentPose& pose, PlanningContext& ctx, Rng& rng);

// AdvanceTrackTimer followed by PlanForTimeHybrid.
HybridPlan PlanTimeHybrid(const FilterBank& bank, TrackTimer& timer,
                          int track_duration, const AgentPose& pose,
                          PlanningContext& ctx, Rng& rng);

}  // namespace activetrack

#endif  // ACTIVETRACK_EXPERTS_H_
