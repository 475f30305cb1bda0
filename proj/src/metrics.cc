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

#include "activetrack/metrics.h"

#include <charconv>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "activetrack/errors.h"

namespace activetrack {

TruthMap ToTruthMap(std::span<const TargetState> targets) {
  TruthMap out;
  for (const TargetState& t : targets) out.emplace(t.id, t.state);
  return out;
}

double GaussianLogPdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("covariance is not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  if (!std::isfinite(log_det)) {
    throw SingularCovariance("covariance determinant is not finite");
  }
  const Eigen::VectorXd white = llt.matrixL().solve(y - mu);
  const double n = static_cast<double>(y.size());
  return -0.5 * (white.squaredNorm() + log_det +
                 n * std::log(2.0 * std::numbers::pi));
}

double Rmse(const std::map<int, Belief>& beliefs, const TruthMap& truths,
            const std::set<int>& detected, double empty_value) {
  if (detected.empty()) return empty_value;
  double total = 0.0;
  for (int id : detected) {
    const Eigen::VectorXd& y = truths.at(id);
    total += (y.head<2>() - beliefs.at(id).mu.head<2>()).norm();
  }
  return total / static_cast<double>(detected.size());
}

double Entropy(const std::map<int, Belief>& beliefs,
               const std::set<int>& detected, int n_y,
               const Eigen::MatrixXd& sigma_bar) {
  double total = 0.0;
  for (int id : detected) total += LogDet(beliefs.at(id).sigma);
  const int undetected = n_y - static_cast<int>(detected.size());
  return total + undetected * LogDet(sigma_bar);
}

double Nll(const std::map<int, Belief>& beliefs, const TruthMap& truths,
           const std::set<int>& detected, const Eigen::MatrixXd& sigma_bar) {
  double total = 0.0;
  for (const auto& [id, y] : truths) {
    if (detected.contains(id)) {
      const Belief& b = beliefs.at(id);
      total -= GaussianLogPdf(y, b.mu, b.sigma);
    } else {
      total -= GaussianLogPdf(y, Eigen::VectorXd::Zero(y.size()), sigma_bar);
    }
  }
  return total;
}

MetricsFrame ComputeMetrics(int t, const FilterBank& bank,
                            const TruthMap& truths, double empty_rmse) {
  MetricsFrame f;
  f.t = t;
  f.n_y = static_cast<int>(truths.size());
  f.detected_count = static_cast<int>(bank.detected().size());
  f.rmse = Rmse(bank.beliefs(), truths, bank.detected(), empty_rmse);
  f.entropy = Entropy(bank.beliefs(), bank.detected(), f.n_y, bank.sigma_bar());
  f.nll = Nll(bank.beliefs(), truths, bank.detected(), bank.sigma_bar());
  return f;
}

std::string FormatDouble(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string MetricsCsv(std::span<const MetricsFrame> frames) {
  std::string out = "t,rmse,entropy,nll,detected_count\n";
  for (const MetricsFrame& f : frames) {
    out += std::to_string(f.t) + "," + FormatDouble(f.rmse) + "," +
           FormatDouble(f.entropy) + "," + FormatDouble(f.nll) + "," +
           std::to_string(f.detected_count) + "\n";
  }
  return out;
}

}  // namespace activetrack
