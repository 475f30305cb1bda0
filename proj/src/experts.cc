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

#include "activetrack/experts.h"

#include "activetrack/errors.h"

namespace activetrack {

std::string ToString(const PlannerMode& mode) {
  return mode.tracking() ? "track" : "explore";
}

PlanningContext PlanningContext::Make(const OccupancyGrid& grid,
                                      const FrontierWeights& weights,
                                      const RrtParams& rrt,
                                      double gain_radius) {
  weights.Validate();
  rrt.Validate();
  PlanningContext ctx;
  ctx.grid = &grid;
  ctx.inflated = Inflate(grid, rrt.safety_margin);
  ctx.visits.assign(grid.size(), 0);
  ctx.weights = weights;
  ctx.rrt = rrt;
  ctx.gain_radius = gain_radius;
  ctx.snap_cells = rrt.safety_margin + 2;
  return ctx;
}

namespace {

Vec2 SnappedOrThrow(const PlanningContext& ctx, const Vec2& p,
                    const char* what) {
  auto snapped = SnapToAdmissible(ctx.inflated, p, ctx.snap_cells);
  if (!snapped) {
    throw InvalidEndpoint(std::string(what) +
                          " has no admissible cell nearby");
  }
  return *snapped;
}

}  // namespace

Path PlanToPoint(const AgentPose& pose, const Vec2& goal, PlanningContext& ctx,
                 Rng& rng) {
  const Vec2 start = SnappedOrThrow(ctx, pose.position(), "start");
  const Vec2 end = SnappedOrThrow(ctx, goal, "goal");
  const Path raw = RrtStarInflated(ctx.inflated, start, end, ctx.rrt, rng);
  return SmoothPathInflated(raw, ctx.inflated);
}

Path PlanFrontier(const AgentPose& pose, PlanningContext& ctx, Rng& rng) {
  const OccupancyGrid& grid = *ctx.grid;
  ctx.inflated.CopyExploredFrom(grid);
  const std::vector<Cell> frontiers = ExtractFrontiers(grid);

  AgentPose from = pose;
  const Vec2 start = SnappedOrThrow(ctx, pose.position(), "start");
  from.x = start.x();
  from.y = start.y();
  const Cell goal = SelectFrontier(frontiers, from, ctx.visits, ctx.inflated,
                                   ctx.weights, ctx.gain_radius);
  ++ctx.visits[grid.Index(goal)];
  return PlanToPoint(from, grid.CellCenter(goal), ctx, rng);
}

PlannerMode DecideUncertaintyMode(const FilterBank& bank, double threshold) {
  int best_id = -1;
  double best = 0.0;
  for (int id : bank.detected()) {  // ascending ids
    const double u = Uncertainty(bank.beliefs().at(id));
    if (best_id < 0 || u > best) {
      best = u;
      best_id = id;
    }
  }
  if (best_id < 0 || best <= threshold) return PlannerMode::Explore();
  return PlannerMode::Track(best_id);
}

HybridPlan PlanUncertaintyHybrid(const FilterBank& bank, double threshold,
                                 const AgentPose& pose, PlanningContext& ctx,
                                 Rng& rng) {
  const PlannerMode mode = DecideUncertaintyMode(bank, threshold);
  if (mode.tracking()) {
    try {
      const Vec2 goal = bank.beliefs().at(mode.target_id).position();
      return {mode, PlanToPoint(pose, goal, ctx, rng)};
    } catch (const InvalidEndpoint&) {
    } catch (const NoPath&) {
    }
  }
  return {PlannerMode::Explore(), PlanFrontier(pose, ctx, rng)};
}

PlannerMode AdvanceTrackTimer(TrackTimer& timer, const std::set<int>& detected,
                              int track_duration) {
  PlannerMode mode = PlannerMode::Explore();
  if (timer.tracking) {
    if (!detected.contains(timer.target_id) || timer.remaining <= 0) {
      timer.tracking = false;
      timer.target_id = -1;
      timer.remaining = 0;
    } else {
      --timer.remaining;
      mode = PlannerMode::Track(timer.target_id);
    }
  } else {
    for (int id : detected) {
      if (!timer.previous_detected.contains(id)) {
        timer.tracking = true;
        timer.target_id = id;
        timer.remaining = track_duration - 1;
        mode = PlannerMode::Track(id);
        break;
      }
    }
  }
  timer.previous_detected = detected;
  return mode;
}

Path PlanForTimeHybrid(const PlannerMode& mode, const FilterBank& bank,
                       const AgentPose& pose, PlanningContext& ctx, Rng& rng) {
  if (!mode.tracking()) return PlanFrontier(pose, ctx, rng);
  try {
    return PlanToPoint(pose, bank.beliefs().at(mode.target_id).position(), ctx,
                       rng);
  } catch (const InvalidEndpoint&) {
  } catch (const NoPath&) {
  }
  return {};
}

HybridPlan PlanTimeHybrid(const FilterBank& bank, TrackTimer& timer,
                          int track_duration, const AgentPose& pose,
                          PlanningContext& ctx, Rng& rng) {
  const PlannerMode mode =
      AdvanceTrackTimer(timer, bank.detected(), track_duration);
  return {mode, PlanForTimeHybrid(mode, bank, pose, ctx, rng)};
}

}  // namespace activetrack
