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

#include "activetrack/replay.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "activetrack/errors.h"
#include "activetrack/metrics.h"

namespace activetrack {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kPad = 40.0;

const char* const kPalette[] = {"#d62728", "#2ca02c", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// World x runs down the rows, so it maps to the SVG y axis.
struct MapFrame {
  double scale = 1.0;
  double Sx(double y) const { return kPad + y * scale; }
  double Sy(double x) const { return kPad + x * scale; }
};

std::string SvgOpen(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(w) +
         "\" height=\"" + Num(h) + "\" viewBox=\"0 0 " + Num(w) + " " + Num(h) +
         "\">\n";
}

std::string Trajectory(const EpisodeRecord& e, int wedge_every) {
  const EpisodeHeader& h = e.header;
  double extent_x = h.map_height * h.resolution;
  double extent_y = h.map_width * h.resolution;
  if (extent_x <= 0 || extent_y <= 0) {
    for (const StepRecord& s : e.steps) {
      extent_x = std::max(extent_x, s.pose.x + 1.0);
      extent_y = std::max(extent_y, s.pose.y + 1.0);
    }
  }
  MapFrame f;
  f.scale = kCanvas / std::max(extent_x, extent_y);
  std::string svg = SvgOpen(2 * kPad + extent_y * f.scale,
                            2 * kPad + extent_x * f.scale);
  svg += "<rect id=\"map\" x=\"" + Num(f.Sx(0)) + "\" y=\"" + Num(f.Sy(0)) +
         "\" width=\"" + Num(extent_y * f.scale) + "\" height=\"" +
         Num(extent_x * f.scale) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (std::size_t i = 0; i < e.steps.size(); i += wedge_every) {
    const AgentPose& p = e.steps[i].pose;
    const double r = h.fov.radius;
    const double a0 = p.theta - h.fov.half_angle;
    const double a1 = p.theta + h.fov.half_angle;
    const bool large = 2 * h.fov.half_angle > 3.141592653589793;
    svg += "<path class=\"fov\" d=\"M " + Num(f.Sx(p.y)) + " " +
           Num(f.Sy(p.x)) + " L " + Num(f.Sx(p.y + r * std::sin(a0))) + " " +
           Num(f.Sy(p.x + r * std::cos(a0))) + " A " + Num(r * f.scale) + " " +
           Num(r * f.scale) + " 0 " + (large ? "1" : "0") + " 0 " +
           Num(f.Sx(p.y + r * std::sin(a1))) + " " +
           Num(f.Sy(p.x + r * std::cos(a1))) +
           " Z\" fill=\"#1f77b4\" fill-opacity=\"0.1\" stroke=\"none\"/>\n";
  }

  std::map<int, std::string> target_points;
  for (const StepRecord& s : e.steps) {
    for (const TruthPoint& y : s.truths) {
      target_points[y.id] += Num(f.Sx(y.y)) + "," + Num(f.Sy(y.x)) + " ";
    }
  }
  for (const auto& [id, points] : target_points) {
    svg += "<polyline class=\"target\" data-id=\"" + std::to_string(id) +
           "\" points=\"" + points + "\" fill=\"none\" stroke=\"" +
           kPalette[static_cast<std::size_t>(id) % 8] +
           "\" stroke-width=\"1\"/>\n";
  }

  std::string agent;
  for (const StepRecord& s : e.steps) {
    if (!agent.empty()) agent += ' ';
    agent += Num(f.Sx(s.pose.y)) + "," + Num(f.Sy(s.pose.x));
  }
  svg += "<polyline id=\"agent\" points=\"" + agent +
         "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  svg += "</svg>\n";
  return svg;
}

std::string Series(const std::string& name, const std::vector<int>& t,
                   const std::vector<double>& values) {
  const double w = kCanvas;
  const double h = 300.0;
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double t0 = t.front();
  const double t1 = std::max<double>(t.back(), t0 + 1);
  std::string data;
  std::string points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) {
      data += ',';
      points += ' ';
    }
    data += FormatDouble(values[i]);
    const double x = kPad + (t[i] - t0) / (t1 - t0) * (w - 2 * kPad);
    const double y = h - kPad - (values[i] - lo) / (hi - lo) * (h - 2 * kPad);
    points += Num(x) + "," + Num(y);
  }
  std::string svg = SvgOpen(w, h);
  svg += "<text x=\"" + Num(kPad) + "\" y=\"20\">" + name + "</text>\n";
  svg += "<text x=\"4\" y=\"" + Num(kPad) + "\">" + Num(hi) + "</text>\n";
  svg += "<text x=\"4\" y=\"" + Num(h - kPad) + "\">" + Num(lo) + "</text>\n";
  svg += "<polyline id=\"" + name + "\" data-values=\"" + data +
         "\" points=\"" + points +
         "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
  svg += "</svg>\n";
  return svg;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedEpisode("cannot write " + path.string());
  out << text;
}

}  // namespace

ReplayFiles RenderReplay(const EpisodeRecord& episode,
                         const std::filesystem::path& out_dir,
                         int wedge_every) {
  if (episode.steps.empty()) throw MalformedEpisode("episode has no steps");
  std::vector<MetricsFrame> frames;
  std::vector<int> t;
  std::vector<double> entropy, nll, rmse;
  for (const StepRecord& s : episode.steps) {
    if (!s.metrics) {
      throw MalformedEpisode("step t=" + std::to_string(s.t) +
                             " carries no metrics");
    }
    frames.push_back(*s.metrics);
    t.push_back(s.t);
    entropy.push_back(s.metrics->entropy);
    nll.push_back(s.metrics->nll);
    rmse.push_back(s.metrics->rmse);
  }
  const int every = std::max(1, wedge_every);
  const std::string trajectory = Trajectory(episode, every);
  const std::string entropy_svg = Series("entropy", t, entropy);
  const std::string nll_svg = Series("nll", t, nll);
  const std::string rmse_svg = Series("rmse", t, rmse);
  const std::string csv = MetricsCsv(frames);

  std::filesystem::create_directories(out_dir);
  ReplayFiles files{out_dir / "trajectory.svg", out_dir / "entropy.svg",
                    out_dir / "nll.svg", out_dir / "rmse.svg",
                    out_dir / "metrics.csv"};
  WriteText(files.trajectory, trajectory);
  WriteText(files.entropy, entropy_svg);
  WriteText(files.nll, nll_svg);
  WriteText(files.rmse, rmse_svg);
  WriteText(files.metrics, csv);
  return files;
}

ReplayFiles ServeReplay(const std::filesystem::path& episode_file,
                        const std::filesystem::path& out_dir) {
  return RenderReplay(ReadEpisode(episode_file), out_dir);
}

}  // namespace activetrack
