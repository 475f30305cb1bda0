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

#include "activetrack/controller.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace activetrack {

std::pair<Vec2, bool> LookaheadPoint(const Path& path, const Vec2& p,
                                     double lookahead) {
  const auto& w = path.waypoints;
  if (w.size() == 1) return {w.front(), true};

  // Projection onto the closest segment (earliest on ties).
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_seg = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const Vec2 seg = w[i + 1] - w[i];
    const double len2 = seg.squaredNorm();
    const double t =
        len2 > 0.0 ? std::clamp((p - w[i]).dot(seg) / len2, 0.0, 1.0) : 0.0;
    const double d2 = (w[i] + t * seg - p).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_seg = i;
      best_t = t;
    }
  }

  double remaining = lookahead;
  Vec2 cursor = w[best_seg] + best_t * (w[best_seg + 1] - w[best_seg]);
  for (std::size_t i = best_seg; i + 1 < w.size(); ++i) {
    const double left = (w[i + 1] - cursor).norm();
    if (left >= remaining && left > 0.0) {
      return {cursor + (w[i + 1] - cursor) * (remaining / left), false};
    }
    remaining -= left;
    cursor = w[i + 1];
  }
  return {w.back(), true};
}

AgentCommand LookaheadControl(const AgentPose& pose, const Path& path,
                              const ControllerParams& params) {
  if (path.empty()) return {};
  const Vec2 p = pose.position();
  const double to_final = (path.waypoints.back() - p).norm();
  if (to_final <= params.goal_tolerance) return {};

  const auto [target, is_final] =
      LookaheadPoint(path, p, params.lookahead_distance);
  const Vec2 delta = target - p;
  const double alpha =
      WrapAngle(std::atan2(delta.y(), delta.x()) - pose.theta);
  double v = params.v_max * (1.0 - std::abs(alpha) / std::numbers::pi);
  if (is_final) v = std::min(v, params.approach_gain * to_final);
  const double omega =
      std::clamp(2.0 * params.v_max * std::sin(alpha) /
                     params.lookahead_distance,
                 -params.omega_max, params.omega_max);
  return {std::max(0.0, v), omega};
}

}  // namespace activetrack
