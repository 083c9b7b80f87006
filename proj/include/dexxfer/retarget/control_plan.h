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

#ifndef DEXXFER_RETARGET_CONTROL_PLAN_H_
#define DEXXFER_RETARGET_CONTROL_PLAN_H_

#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/hand/hand_model.h"
#include "dexxfer/retarget/spline.h"

namespace dexxfer {

// Joint-space plant the controls are computed for: PD position servos with
// armature, loaded by gravity on the hand links.
struct ActuatorModel {
  std::vector<JointGains> gains;
  Eigen::Vector3d gravity = Eigen::Vector3d::Zero();

  // A plant with no dynamics: controls equal positions.
  static ActuatorModel Ideal(int dof);
};

// Feedforward torque armature * q'' + kd * q' - gravity(q): what the servo
// must add to track q(t).
Eigen::VectorXd InverseDynamics(const HandModel& model, const ActuatorModel& plant,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const Eigen::VectorXd& qdd);

// Samples q(t) at `frequency` Hz over n = round(knots * frequency / fps)
// steps (t_j = j / frequency) and converts each sample to the PD position
// target q + kp^-1 * tau_ff. Throws ConfigError on a non-positive kp.
Eigen::MatrixXd ToControlSequence(const SmoothTrajectory& trajectory, const HandModel& model,
                                  const ActuatorModel& plant, double frequency, double fps);

struct PrimaryStep {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Pose6 object;
  bool contact = false;
};

struct ControlPlan {
  Eigen::MatrixXd joint_trajectory;  // Q, T x D
  SmoothTrajectory smooth;           // q(t)
  Eigen::MatrixXd controls;          // A_primary, n x D
  double frequency = 120.0;
  std::vector<PrimaryStep> primary;  // PT from replaying `controls`

  int length() const { return static_cast<int>(controls.rows()); }
  Json ToJson() const;
  static ControlPlan FromJson(const Json& j);
};

}  // namespace dexxfer

#endif  // DEXXFER_RETARGET_CONTROL_PLAN_H_
