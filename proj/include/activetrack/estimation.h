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

#ifndef ACTIVETRACK_ESTIMATION_H_
#define ACTIVETRACK_ESTIMATION_H_

#include <limits>
#include <map>
#include <set>
#include <span>

#include <Eigen/Core>

#include "activetrack/grid.h"
#include "activetrack/world.h"

namespace activetrack {

enum class TrackStatus { kUndetected, kTracked, kLost };

struct Belief {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  TrackStatus status = TrackStatus::kUndetected;

  Vec2 position() const { return mu.head<2>(); }
};

// Hypothesized linear-Gaussian model used by the filters. It differs from the
// true simulation model in its noise magnitudes.
struct FilterModel {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd H;
  Eigen::MatrixXd R;

  // A = H = I, Q = diag(90, 40), R = diag(0.5^2, 0.5^2).
  static FilterModel Default();
};

// Returned by Uncertainty() when the determinant underflows or the matrix is
// singular.
inline constexpr double kLogDetFloor = std::numeric_limits<double>::lowest();

// log det(sigma) from a Cholesky factor, falling back to eigenvalues for
// semidefinite input.
double LogDet(const Eigen::MatrixXd& sigma);
inline double Uncertainty(const Belief& belief) { return LogDet(belief.sigma); }

// mu' = A mu, sigma' = A sigma A^T + Q, symmetrized.
Belief KfPredict(const Belief& belief, const Eigen::MatrixXd& A,
                 const Eigen::MatrixXd& Q);

// Kalman update with Joseph-form covariance. Throws SingularInnovation when
// the innovation covariance has an eigenvalue <= 1e-12.
Belief KfUpdate(const Belief& belief, const Eigen::VectorXd& z,
                const Eigen::MatrixXd& H, const Eigen::MatrixXd& R);

// Placeholder belief for a target that has not been detected: centered at
// the environment origin with the uninformative covariance sigma_bar.
Belief UndetectedBelief(const Eigen::MatrixXd& sigma_bar);

// diag(s, ..., s) with s = max((diagonal / 2)^2, e): the 2-sigma ellipse
// covers the map diagonal and log det stays above 1.
Eigen::MatrixXd DefaultSigmaBar(const OccupancyGrid& grid, int n_y = 2);

class FilterBank {
 public:
  FilterBank() = default;
  // `init_sigma` is the covariance given to a newly detected target.
  // Throws InvalidConfig if log det(sigma_bar) <= 1.
  FilterBank(FilterModel model, Eigen::MatrixXd sigma_bar,
             Eigen::MatrixXd init_sigma);

  const std::map<int, Belief>& beliefs() const { return beliefs_; }
  std::map<int, Belief>& mutable_beliefs() { return beliefs_; }
  const std::set<int>& detected() const { return detected_; }
  std::set<int>& mutable_detected() { return detected_; }
  const FilterModel& model() const { return model_; }
  const Eigen::MatrixXd& sigma_bar() const { return sigma_bar_; }
  const Eigen::MatrixXd& init_sigma() const { return init_sigma_; }

  // Belief for `id`, or the undetected placeholder when none exists.
  Belief BeliefOrPlaceholder(int id) const;

  // One filtering step:
  //  1. predict every existing belief;
  //  2. update measured ids (new ids are initialized from the measurement)
  //     and add them to the detected set as Tracked;
  //  3. detected ids without a measurement whose predicted position lies in
  //     the field of view become Lost and leave the detected set.
  void ProcessStep(std::span<const Measurement> measurements,
                   const AgentPose& pose, const OccupancyGrid& grid,
                   const FieldOfView& fov);

 private:
  std::map<int, Belief> beliefs_;
  std::set<int> detected_;
  FilterModel model_;
  Eigen::MatrixXd sigma_bar_;
  Eigen::MatrixXd init_sigma_;
  Eigen::MatrixXd lift_;  // pseudo-inverse of H
};

}  // namespace activetrack

#endif  // ACTIVETRACK_ESTIMATION_H_
