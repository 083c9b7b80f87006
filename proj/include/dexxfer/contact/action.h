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

#ifndef DEXXFER_CONTACT_ACTION_H_
#define DEXXFER_CONTACT_ACTION_H_

#include <Eigen/Core>

namespace dexxfer {

// Maps normalized actions in [-1, 1] to joint targets. The first
// rho.size() dimensions (the wrist) cover q_pre +- rho; the remaining ones
// cover their full joint range.
class ActionScaler {
 public:
  ActionScaler(Eigen::VectorXd q_pre, Eigen::VectorXd rho, Eigen::VectorXd lower,
               Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(q_pre_.size()); }
  int wrist_dims() const { return static_cast<int>(rho_.size()); }

  Eigen::VectorXd Rescale(const Eigen::VectorXd& a) const;
  Eigen::VectorXd Normalize(const Eigen::VectorXd& target) const;

  // rescale(clip(normalize(primary) + clamp(delta, +-delta_max), -1, 1)).
  Eigen::VectorXd Compose(const Eigen::VectorXd& primary, const Eigen::VectorXd& delta,
                          double delta_max) const;

 private:
  Eigen::VectorXd q_pre_;
  Eigen::VectorXd rho_;
  Eigen::VectorXd lower_;
  Eigen::VectorXd range_;
};

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_ACTION_H_
