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

#include "activetrack/rrt_star.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "activetrack/errors.h"

namespace activetrack {

double PathLength(const std::vector<Vec2>& waypoints) {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += (waypoints[i] - waypoints[i - 1]).norm();
  }
  return total;
}

Path MakePath(std::vector<Vec2> waypoints) {
  Path path;
  path.cost = PathLength(waypoints);
  path.waypoints = std::move(waypoints);
  return path;
}

RrtParams RrtParams::ForResolution(double resolution) {
  RrtParams p;
  p.step_size = 5.0 * resolution;
  p.rewire_radius = 10.0 * resolution;
  p.goal_tolerance = 2.0 * resolution;
  return p;
}

void RrtParams::Validate() const {
  if (max_iterations <= 0 || !(step_size > 0) || !(rewire_radius > 0) ||
      !(goal_bias > 0) || goal_bias > 1 || safety_margin <= 0 ||
      !(goal_tolerance > 0)) {
    throw InvalidConfig("RRT* parameters must be positive, goal_bias <= 1");
  }
}

bool PathCollisionFree(const OccupancyGrid& inflated, const Path& path) {
  if (path.waypoints.empty()) return true;
  if (!Admissible(inflated, path.waypoints.front())) return false;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    if (!SegmentFree(inflated, path.waypoints[i - 1], path.waypoints[i])) {
      return false;
    }
  }
  return true;
}

namespace {

struct Node {
  Vec2 p;
  int parent = -1;
  double cost = 0.0;
  std::vector<int> children;
};

// Uniform bucket grid over the map extent for neighborhood queries.
class NodeIndex {
 public:
  NodeIndex(double extent_x, double extent_y, double bucket)
      : bucket_(bucket),
        rows_(std::max(1, static_cast<int>(std::ceil(extent_x / bucket)))),
        cols_(std::max(1, static_cast<int>(std::ceil(extent_y / bucket)))),
        buckets_(static_cast<std::size_t>(rows_) * cols_) {}

  void Insert(int id, const Vec2& p) { buckets_[BucketOf(p)].push_back(id); }

  int Nearest(const std::vector<Node>& nodes, const Vec2& p) const {
    const auto [br, bc] = Coords(p);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(rows_, cols_);
    for (int ring = 0; ring <= max_ring; ++ring) {
      // Every point in ring k is at least (k - 1) * bucket away.
      if (best >= 0) {
        const double bound = (ring - 1) * bucket_;
        if (bound > 0 && bound * bound > best_d2) break;
      }
      for (int r = br - ring; r <= br + ring; ++r) {
        for (int c = bc - ring; c <= bc + ring; ++c) {
          if (std::max(std::abs(r - br), std::abs(c - bc)) != ring) continue;
          if (r < 0 || r >= rows_ || c < 0 || c >= cols_) continue;
          for (int id : buckets_[static_cast<std::size_t>(r) * cols_ + c]) {
            const double d2 = (nodes[id].p - p).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && id < best)) {
              best_d2 = d2;
              best = id;
            }
          }
        }
      }
    }
    return best;
  }

  std::vector<int> Within(const std::vector<Node>& nodes, const Vec2& p,
                          double radius) const {
    std::vector<int> out;
    const int reach = static_cast<int>(std::ceil(radius / bucket_));
    const auto [br, bc] = Coords(p);
    for (int r = std::max(0, br - reach); r <= std::min(rows_ - 1, br + reach);
         ++r) {
      for (int c = std::max(0, bc - reach);
           c <= std::min(cols_ - 1, bc + reach); ++c) {
        for (int id : buckets_[static_cast<std::size_t>(r) * cols_ + c]) {
          if ((nodes[id].p - p).squaredNorm() <= radius * radius) {
            out.push_back(id);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::pair<int, int> Coords(const Vec2& p) const {
    return {std::clamp(static_cast<int>(std::floor(p.x() / bucket_)), 0,
                       rows_ - 1),
            std::clamp(static_cast<int>(std::floor(p.y() / bucket_)), 0,
                       cols_ - 1)};
  }
  std::size_t BucketOf(const Vec2& p) const {
    const auto [r, c] = Coords(p);
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  double bucket_;
  int rows_;
  int cols_;
  std::vector<std::vector<int>> buckets_;
};

void PropagateCost(std::vector<Node>& nodes, int root, double delta) {
  std::vector<int> stack(nodes[root].children);
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    nodes[id].cost += delta;
    stack.insert(stack.end(), nodes[id].children.begin(),
                 nodes[id].children.end());
  }
}

void Reparent(std::vector<Node>& nodes, int id, int new_parent,
              double new_cost) {
  Node& node = nodes[id];
  auto& siblings = nodes[node.parent].children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), id));
  const double delta = new_cost - node.cost;
  node.parent = new_parent;
  node.cost = new_cost;
  nodes[new_parent].children.push_back(id);
  PropagateCost(nodes, id, delta);
}

}  // namespace

Path RrtStarInflated(const OccupancyGrid& inflated, const Vec2& start,
                     const Vec2& goal, const RrtParams& params, Rng& rng) {
  params.Validate();
  if (!Admissible(inflated, start)) {
    throw InvalidEndpoint("start lies inside an inflated obstacle");
  }
  if (!Admissible(inflated, goal)) {
    throw InvalidEndpoint("goal lies inside an inflated obstacle");
  }
  if ((goal - start).norm() <= params.goal_tolerance) {
    return MakePath({start});
  }

  const double extent_x = inflated.height() * inflated.resolution();
  const double extent_y = inflated.width() * inflated.resolution();
  NodeIndex index(extent_x, extent_y, params.rewire_radius);
  std::vector<Node> nodes;
  nodes.push_back({start, -1, 0.0, {}});
  index.Insert(0, start);
  std::vector<int> goal_nodes;

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    Vec2 sample;
    if (rng.Uniform() < params.goal_bias) {
      sample = goal;
    } else {
      const double sx = rng.Uniform() * extent_x;
      const double sy = rng.Uniform() * extent_y;
      sample = {sx, sy};
    }
    const int nearest = index.Nearest(nodes, sample);
    const Vec2 from = nodes[nearest].p;
    const double d = (sample - from).norm();
    if (d < 1e-12) continue;
    const Vec2 to = d <= params.step_size
                        ? sample
                        : Vec2(from + (sample - from) * (params.step_size / d));
    if (!Admissible(inflated, to) || !SegmentFree(inflated, from, to)) continue;

    const std::vector<int> near = index.Within(nodes, to, params.rewire_radius);
    int parent = nearest;
    double best_cost = nodes[nearest].cost + (to - from).norm();
    for (int id : near) {
      if (id == nearest) continue;
      const double c = nodes[id].cost + (to - nodes[id].p).norm();
      if (c < best_cost && SegmentFree(inflated, nodes[id].p, to)) {
        best_cost = c;
        parent = id;
      }
    }
    const int new_id = static_cast<int>(nodes.size());
    nodes.push_back({to, parent, best_cost, {}});
    nodes[parent].children.push_back(new_id);
    index.Insert(new_id, to);

    for (int id : near) {
      if (id == parent) continue;
      const double c = best_cost + (nodes[id].p - to).norm();
      if (c < nodes[id].cost && SegmentFree(inflated, to, nodes[id].p)) {
        Reparent(nodes, id, new_id, c);
      }
    }
    if ((to - goal).norm() <= params.goal_tolerance) goal_nodes.push_back(new_id);
  }

  if (goal_nodes.empty()) {
    throw NoPath("RRT* did not reach the goal within " +
                 std::to_string(params.max_iterations) + " iterations");
  }
  int best = goal_nodes.front();
  for (int id : goal_nodes) {
    if (nodes[id].cost < nodes[best].cost) best = id;
  }
  std::vector<Vec2> waypoints;
  for (int id = best; id >= 0; id = nodes[id].parent) {
    waypoints.push_back(nodes[id].p);
  }
  std::reverse(waypoints.begin(), waypoints.end());
  return MakePath(std::move(waypoints));
}

Path RrtStar(const OccupancyGrid& grid, const Vec2& start, const Vec2& goal,
             const RrtParams& params, Rng& rng) {
  return RrtStarInflated(Inflate(grid, params.safety_margin), start, goal,
                         params, rng);
}

Path SmoothPathInflated(const Path& path, const OccupancyGrid& inflated) {
  const auto& in = path.waypoints;
  if (in.size() <= 2) return MakePath(in);
  std::vector<Vec2> out{in.front()};
  std::size_t i = 0;
  while (i + 1 < in.size()) {
    std::size_t j = in.size() - 1;
    while (j > i + 1 && !SegmentFree(inflated, in[i], in[j])) --j;
    out.push_back(in[j]);
    i = j;
  }
  return MakePath(std::move(out));
}

Path SmoothPath(const Path& path, const OccupancyGrid& grid, int margin) {
  return SmoothPathInflated(path, Inflate(grid, margin));
}

std::optional<Vec2> SnapToAdmissible(const OccupancyGrid& inflated,
                                     const Vec2& p, int max_cells) {
  if (Admissible(inflated, p)) return p;
  const Cell center = inflated.CellOf(p);
  std::optional<Vec2> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int dr = -max_cells; dr <= max_cells; ++dr) {
    for (int dc = -max_cells; dc <= max_cells; ++dc) {
      const Cell c{center.row + dr, center.col + dc};
      if (!inflated.IsFree(c)) continue;
      const Vec2 q = inflated.CellCenter(c);
      const double d2 = (q - p).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = q;
      }
    }
  }
  return best;
}

}  // namespace activetrack
