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

#ifndef ACTIVETRACK_CONTROLLER_H_
#define ACTIVETRACK_CONTROLLER_H_

#include <utility>

#include "activetrack/rrt_star.h"
#include "activetrack/world.h"

namespace activetrack {

struct ControllerParams {
  double lookahead_distance = 1.0;  // meters
  double v_max = 1.0;
  double omega_max = 1.0;
  double goal_tolerance = 0.2;
  // Speed is capped at approach_gain * (distance to the final waypoint) once
  // the lookahead point is the final waypoint.
  double approach_gain = 1.0;
};

// Point at arc length `lookahead` past the projection of `p` onto the path,
// or the final waypoint when the path ends sooner. Second member is true when
// the final waypoint was returned.
std::pair<Vec2, bool> LookaheadPoint(const Path& path, const Vec2& p,
                                     double lookahead);

// Pure pursuit: alpha is the bearing error to the lookahead point,
// v = v_max (1 - |alpha| / pi), omega = clamp(2 v_max sin(alpha) / L).
// Returns (0, 0) within goal_tolerance of the final waypoint.
AgentCommand LookaheadControl(const AgentPose& pose, const Path& path,
                              const ControllerParams& params);

}  // namespace activetrack

#endif  // ACTIVETRACK_CONTROLLER_H_
