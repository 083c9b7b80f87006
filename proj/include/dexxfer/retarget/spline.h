// Copyright 2026 The dexxfer Authors.
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

#ifndef DEXXFER_RETARGET_SPLINE_H_
#define DEXXFER_RETARGET_SPLINE_H_

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"

namespace dexxfer {

// How the two free end conditions of a C2 interpolating cubic are chosen.
enum class SplineEnds {
  kMinimumJerk,  // minimize the integrated squared third derivative
  kNatural,      // zero second derivative at both ends
};

// Per-joint C2 piecewise-cubic interpolant of a T x D knot matrix, stored as
// knot values and knot second derivatives. Times outside the knot range are
// clamped.
class SmoothTrajectory {
 public:
  SmoothTrajectory() = default;
  // Throws ConfigError unless T >= 4 and times are strictly increasing.
  static SmoothTrajectory Fit(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                              SplineEnds ends = SplineEnds::kMinimumJerk);
  static SmoothTrajectory FitUniform(const Eigen::MatrixXd& values, double fps,
                                     SplineEnds ends = SplineEnds::kMinimumJerk);

  int dof() const { return static_cast<int>(values_.cols()); }
  int knots() const { return static_cast<int>(values_.rows()); }
  double start_time() const { return times_[0]; }
  double end_time() const { return times_[times_.size() - 1]; }
  const Eigen::VectorXd& times() const { return times_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& second_derivatives() const { return second_; }

  // derivative order 0..3.
  Eigen::VectorXd Evaluate(double t, int derivative = 0) const;
  // Sum over joints of the integral of the squared third derivative.
  double JerkCost() const;

  Json ToJson() const;
  static SmoothTrajectory FromJson(const Json& j);

 private:
  Eigen::VectorXd times_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd second_;
};

}  // namespace dexxfer

#endif  // DEXXFER_RETARGET_SPLINE_H_
