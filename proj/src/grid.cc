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

#include "activetrack/grid.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "activetrack/errors.h"

namespace activetrack {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution)
    : width_(width), height_(height), resolution_(resolution) {
  if (width <= 0 || height <= 0 || !(resolution > 0.0)) {
    throw MalformedMap("grid dimensions and resolution must be positive");
  }
  cells_.assign(static_cast<std::size_t>(width) * height, Occupancy::kFree);
  explored_.assign(cells_.size(), 0);
}

void OccupancyGrid::ClearExplored() {
  std::fill(explored_.begin(), explored_.end(), 0);
}

int OccupancyGrid::ExploredCount() const {
  return static_cast<int>(
      std::count(explored_.begin(), explored_.end(), std::uint8_t{1}));
}

int OccupancyGrid::FreeCount() const {
  return static_cast<int>(
      std::count(cells_.begin(), cells_.end(), Occupancy::kFree));
}

double OccupancyGrid::Diagonal() const {
  return std::hypot(width_ * resolution_, height_ * resolution_);
}

namespace {

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string NextToken(const std::vector<std::uint8_t>& bytes,
                      std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(bytes[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() && !std::isspace(bytes[pos]) && bytes[pos] != '#') {
    token.push_back(static_cast<char>(bytes[pos++]));
  }
  return token;
}

int ParsePositive(const std::string& token, const char* what) {
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](char ch) { return std::isdigit(ch) != 0; }) ||
      token.size() > 9) {
    throw MalformedMap(std::string("bad PGM ") + what + ": '" + token + "'");
  }
  const int value = std::stoi(token);
  if (value <= 0) throw MalformedMap(std::string("PGM ") + what + " is zero");
  return value;
}

}  // namespace

OccupancyGrid ParsePgm(const std::vector<std::uint8_t>& bytes,
                       double resolution, int threshold) {
  std::size_t pos = 0;
  if (NextToken(bytes, pos) != "P5") throw MalformedMap("not a P5 PGM file");
  const int width = ParsePositive(NextToken(bytes, pos), "width");
  const int height = ParsePositive(NextToken(bytes, pos), "height");
  const int maxval = ParsePositive(NextToken(bytes, pos), "maxval");
  if (maxval != 255) throw MalformedMap("PGM maxval must be 255");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw MalformedMap("PGM header not terminated");
  }
  ++pos;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - pos < count) {
    throw MalformedMap("PGM raster truncated: expected " +
                       std::to_string(count) + " bytes, found " +
                       std::to_string(bytes.size() - pos));
  }
  OccupancyGrid grid(width, height, resolution);
  for (std::size_t i = 0; i < count; ++i) {
    if (bytes[pos + i] < threshold) {
      grid.SetOccupancy(grid.CellAt(static_cast<int>(i)),
                        Occupancy::kOccupied);
    }
  }
  if (grid.FreeCount() == 0) throw EmptyFreeSpace("map has no free cell");
  return grid;
}

OccupancyGrid LoadMap(const std::filesystem::path& path, double resolution,
                      int threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedMap("cannot open map file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return ParsePgm(bytes, resolution, threshold);
}

void WritePgm(const OccupancyGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  for (Occupancy value : grid.cells()) {
    out.put(value == Occupancy::kOccupied ? static_cast<char>(0)
                                          : static_cast<char>(255));
  }
}

OccupancyGrid MakeHouseMap(double resolution) {
  const int n = static_cast<int>(std::lround(20.0 / resolution));
  OccupancyGrid grid(n, n, resolution);
  struct Box {
    double x0, x1, y0, y1;
  };
  // Walls, then furniture; extents in meters.
  const Box boxes[] = {
      {0.0, 0.2, 0.0, 20.0},  {19.8, 20.0, 0.0, 20.0},
      {0.0, 20.0, 0.0, 0.2},  {0.0, 20.0, 19.8, 20.0},
      // upper corridor wall with two doors
      {7.9, 8.1, 0.0, 3.0},   {7.9, 8.1, 4.5, 14.0},
      {7.9, 8.1, 15.5, 20.0},
      // lower corridor wall with two doors
      {10.9, 11.1, 0.0, 5.0}, {10.9, 11.1, 6.5, 15.0},
      {10.9, 11.1, 16.5, 20.0},
      // room dividers
      {0.0, 5.0, 9.9, 10.1},  {6.5, 8.0, 9.9, 10.1},
      {11.0, 13.0, 8.9, 9.1}, {14.5, 20.0, 8.9, 9.1},
      // furniture
      {2.0, 3.5, 2.0, 4.0},   {1.0, 1.8, 13.0, 17.0},
      {15.0, 17.0, 3.0, 5.0}, {16.0, 18.0, 12.0, 13.0},
      {4.5, 5.5, 15.5, 16.5},
  };
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Vec2 p = grid.CellCenter({r, c});
      for (const Box& b : boxes) {
        if (p.x() >= b.x0 && p.x() < b.x1 && p.y() >= b.y0 && p.y() < b.y1) {
          grid.SetOccupancy({r, c}, Occupancy::kOccupied);
          break;
        }
      }
    }
  }
  return grid;
}

OccupancyGrid Inflate(const OccupancyGrid& grid, int margin) {
  OccupancyGrid out = grid;
  if (margin <= 0) return out;
  for (int r = 0; r < grid.height(); ++r) {
    for (int c = 0; c < grid.width(); ++c) {
      if (grid.cells()[grid.Index({r, c})] != Occupancy::kOccupied) continue;
      for (int dr = -margin; dr <= margin; ++dr) {
        for (int dc = -margin; dc <= margin; ++dc) {
          const Cell n{r + dr, c + dc};
          if (dr * dr + dc * dc <= margin * margin && out.InBounds(n)) {
            out.SetOccupancy(n, Occupancy::kOccupied);
          }
        }
      }
    }
  }
  return out;
}

bool LineOfSight(const OccupancyGrid& grid, const Vec2& a, const Vec2& b) {
  const Cell start = grid.CellOf(a);
  const Cell end = grid.CellOf(b);
  bool clear = true;
  TraverseSegment(grid.resolution(), a, b, [&](Cell c) {
    if (c != start && c != end && grid.IsOccupied(c)) clear = false;
    return clear;
  });
  return clear;
}

bool SegmentFree(const OccupancyGrid& grid, const Vec2& a, const Vec2& b) {
  bool clear = true;
  TraverseSegment(grid.resolution(), a, b, [&](Cell c) {
    if (grid.IsOccupied(c)) clear = false;
    return clear;
  });
  return clear;
}

}  // namespace activetrack
