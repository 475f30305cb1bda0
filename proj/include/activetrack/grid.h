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

#ifndef ACTIVETRACK_GRID_H_
#define ACTIVETRACK_GRID_H_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace activetrack {

using Vec2 = Eigen::Vector2d;

// Grid frame: world x runs along rows (downward in the image), world y along
// columns. Cell (row, col) covers [row, row+1) x [col, col+1) in units of
// resolution; the world origin is the top-left corner of cell (0, 0).
struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

enum class Occupancy : std::uint8_t { kFree = 0, kOccupied = 1 };

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  // All cells Free and unexplored.
  OccupancyGrid(int width, int height, double resolution);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  int size() const { return width_ * height_; }

  bool InBounds(Cell c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  int Index(Cell c) const { return c.row * width_ + c.col; }
  Cell CellAt(int index) const { return {index / width_, index % width_}; }

  // Out-of-bounds cells count as occupied.
  bool IsOccupied(Cell c) const {
    return !InBounds(c) || cells_[Index(c)] == Occupancy::kOccupied;
  }
  bool IsFree(Cell c) const { return !IsOccupied(c); }
  void SetOccupancy(Cell c, Occupancy value) { cells_[Index(c)] = value; }

  bool IsExplored(Cell c) const { return InBounds(c) && explored_[Index(c)]; }
  void MarkExplored(Cell c) { explored_[Index(c)] = 1; }
  void ClearExplored();
  // Replaces the explored mask with `other`'s; dimensions must match.
  void CopyExploredFrom(const OccupancyGrid& other) {
    explored_ = other.explored_;
  }
  int ExploredCount() const;
  int FreeCount() const;

  Cell CellOf(const Vec2& p) const {
    return {static_cast<int>(std::floor(p.x() / resolution_)),
            static_cast<int>(std::floor(p.y() / resolution_))};
  }
  Vec2 CellCenter(Cell c) const {
    return {(c.row + 0.5) * resolution_, (c.col + 0.5) * resolution_};
  }
  bool Contains(const Vec2& p) const { return InBounds(CellOf(p)); }

  // Length of the map diagonal in meters.
  double Diagonal() const;

  const std::vector<Occupancy>& cells() const { return cells_; }
  const std::vector<std::uint8_t>& explored() const { return explored_; }

  friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.0;
  std::vector<Occupancy> cells_;
  std::vector<std::uint8_t> explored_;
};

// Reads a binary PGM (P5, maxval 255). A cell is Occupied iff its gray value
// is below `threshold`. Throws MalformedMap or EmptyFreeSpace.
OccupancyGrid LoadMap(const std::filesystem::path& path, double resolution,
                      int threshold = 128);
OccupancyGrid ParsePgm(const std::vector<std::uint8_t>& bytes,
                       double resolution, int threshold = 128);
// Free cells are written as 255, occupied as 0.
void WritePgm(const OccupancyGrid& grid, const std::filesystem::path& path);

// Built-in 20 m x 20 m floor plan with four rooms, a corridor and furniture.
OccupancyGrid MakeHouseMap(double resolution = 0.1);

// Copy of `grid` where every cell within `margin` cells (Euclidean, center to
// center) of an Occupied cell is Occupied. The explored mask is preserved.
OccupancyGrid Inflate(const OccupancyGrid& grid, int margin);

// Visits the cells crossed by segment a-b in traversal order, starting with
// the cell containing a and ending with the cell containing b. At exact
// corner crossings both side cells are visited before the diagonal one.
// `visit(Cell)` returns false to stop early.
template <typename Visitor>
void TraverseSegment(double resolution, const Vec2& a, const Vec2& b,
                     Visitor&& visit) {
  const double ax = a.x() / resolution, ay = a.y() / resolution;
  const double bx = b.x() / resolution, by = b.y() / resolution;
  int r = static_cast<int>(std::floor(ax));
  int c = static_cast<int>(std::floor(ay));
  const int end_r = static_cast<int>(std::floor(bx));
  const int end_c = static_cast<int>(std::floor(by));
  if (!visit(Cell{r, c})) return;
  const double dx = bx - ax, dy = by - ay;
  const int step_r = end_r > r ? 1 : (end_r < r ? -1 : 0);
  const int step_c = end_c > c ? 1 : (end_c < c ? -1 : 0);
  constexpr double kInf = 1e300;
  const double delta_r = step_r != 0 ? 1.0 / std::abs(dx) : kInf;
  const double delta_c = step_c != 0 ? 1.0 / std::abs(dy) : kInf;
  double max_r = step_r > 0   ? (r + 1 - ax) / dx
                 : step_r < 0 ? (ax - r) / -dx
                              : kInf;
  double max_c = step_c > 0   ? (c + 1 - ay) / dy
                 : step_c < 0 ? (ay - c) / -dy
                              : kInf;
  int remaining = std::abs(end_r - r) + std::abs(end_c - c);
  while (remaining > 0) {
    const bool can_r = r != end_r;
    const bool can_c = c != end_c;
    if (can_r && (!can_c || max_r < max_c)) {
      r += step_r;
      max_r += delta_r;
      --remaining;
    } else if (can_c && (!can_r || max_c < max_r)) {
      c += step_c;
      max_c += delta_c;
      --remaining;
    } else {
      if (!visit(Cell{r + step_r, c})) return;
      if (!visit(Cell{r, c + step_c})) return;
      r += step_r;
      c += step_c;
      max_r += delta_r;
      max_c += delta_c;
      remaining -= 2;
    }
    if (!visit(Cell{r, c})) return;
  }
}

// True iff no Occupied (or out-of-bounds) cell strictly between the cells of
// a and b is crossed by the segment.
bool LineOfSight(const OccupancyGrid& grid, const Vec2& a, const Vec2& b);

// True iff every crossed cell, endpoints included, is Free.
bool SegmentFree(const OccupancyGrid& grid, const Vec2& a, const Vec2& b);

}  // namespace activetrack

#endif  // ACTIVETRACK_GRID_H_
