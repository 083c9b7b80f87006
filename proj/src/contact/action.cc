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

#include "dexxfer/contact/action.h"

#include <utility>

#include "dexxfer/common/errors.h"

namespace dexxfer {

ActionScaler::ActionScaler(Eigen::VectorXd q_pre, Eigen::VectorXd rho, Eigen::VectorXd lower,
                           Eigen::VectorXd upper)
    : q_pre_(std::move(q_pre)), rho_(std::move(rho)) {
  const Eigen::Index d = q_pre_.size();
  if (lower.size() != d || upper.size() != d || rho_.size() > d) {
    throw DimensionError("action scaler dimensions do not match");
  }
  if ((rho_.array() <= 0.0).any()) throw ConfigError("wrist neighborhood radius must be positive");
  if ((upper.array() <= lower.array()).any()) throw ConfigError("joint range must be non-empty");
  lower_ = std::move(lower);
  range_ = upper - lower_;
}

Eigen::VectorXd ActionScaler::Rescale(const Eigen::VectorXd& a) const {
  if (a.size() != q_pre_.size()) throw DimensionError("action has the wrong dimension");
  Eigen::VectorXd out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out[i] = i < rho_.size() ? q_pre_[i] + a[i] * rho_[i] : lower_[i] + 0.5 * (a[i] + 1.0) * range_[i];
  }
  return out;
}

Eigen::VectorXd ActionScaler::Normalize(const Eigen::VectorXd& target) const {
  if (target.size() != q_pre_.size()) throw DimensionError("target has the wrong dimension");
  Eigen::VectorXd out(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    out[i] = i < rho_.size() ? (target[i] - q_pre_[i]) / rho_[i]
                             : 2.0 * (target[i] - lower_[i]) / range_[i] - 1.0;
  }
  return out;
}

Eigen::VectorXd ActionScaler::Compose(const Eigen::VectorXd& primary, const Eigen::VectorXd& delta,
                                      double delta_max) const {
  const Eigen::VectorXd a =
      (Normalize(primary) + delta.cwiseMax(-delta_max).cwiseMin(delta_max)).cwiseMax(-1.0).cwiseMin(1.0);
  return Rescale(a);
}

}  // namespace dexxfer
