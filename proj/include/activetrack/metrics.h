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

#ifndef ACTIVETRACK_METRICS_H_
#define ACTIVETRACK_METRICS_H_

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "activetrack/estimation.h"
#include "activetrack/world.h"

namespace activetrack {

struct MetricsFrame {
  int t = 0;
  double rmse = 0.0;
  double entropy = 0.0;
  double nll = 0.0;
  int detected_count = 0;
  int n_y = 0;

  friend bool operator==(const MetricsFrame&, const MetricsFrame&) = default;
};

// Ground-truth target states keyed by id.
using TruthMap = std::map<int, Eigen::VectorXd>;
TruthMap ToTruthMap(std::span<const TargetState> targets);

// log N(y | mu, sigma). Throws SingularCovariance when sigma is not positive
// definite.
double GaussianLogPdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& sigma);

// Mean over detected targets of the position error ||p(y) - p(mu)||; returns
// `empty_value` when nothing is detected.
double Rmse(const std::map<int, Belief>& beliefs, const TruthMap& truths,
            const std::set<int>& detected, double empty_value);

// Sum of detected log dets plus (n_y - |detected|) log det(sigma_bar).
double Entropy(const std::map<int, Belief>& beliefs,
               const std::set<int>& detected, int n_y,
               const Eigen::MatrixXd& sigma_bar);

// Detected targets score -log N(y | mu, sigma); the rest -log N(y | 0,
// sigma_bar).
double Nll(const std::map<int, Belief>& beliefs, const TruthMap& truths,
           const std::set<int>& detected, const Eigen::MatrixXd& sigma_bar);

MetricsFrame ComputeMetrics(int t, const FilterBank& bank,
                            const TruthMap& truths, double empty_rmse);

// "t,rmse,entropy,nll,detected_count" with shortest round-trip doubles.
std::string MetricsCsv(std::span<const MetricsFrame> frames);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace activetrack

#endif  // ACTIVETRACK_METRICS_H_
