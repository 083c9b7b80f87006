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

#include "dexxfer/retarget/control_plan.h"

#include <cmath>

#include "dexxfer/common/errors.h"

namespace dexxfer {

ActuatorModel ActuatorModel::Ideal(int dof) {
  ActuatorModel m;
  m.gains.assign(dof, JointGains{1.0, 0.0, 0.0});
  return m;
}

Eigen::VectorXd InverseDynamics(const HandModel& model, const ActuatorModel& plant,
                                const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                const Eigen::VectorXd& qdd) {
  const int d = model.dof();
  if (static_cast<int>(plant.gains.size()) != d) throw DimensionError("plant gains do not match hand DoF");
  Eigen::VectorXd tau(d);
  for (int j = 0; j < d; ++j) tau[j] = plant.gains[j].armature * qdd[j] + plant.gains[j].kd * qd[j];
  if (plant.gravity.squaredNorm() > 0.0) {
    tau -= model.GravityTorques(model.ForwardKinematics(q), plant.gravity);
  }
  return tau;
}

Eigen::MatrixXd ToControlSequence(const SmoothTrajectory& trajectory, const HandModel& model,
                                  const ActuatorModel& plant, double frequency, double fps) {
  if (!(frequency > 0.0)) throw ConfigError("control frequency must be positive");
  if (!(fps > 0.0)) throw ConfigError("fps must be positive");
  const int d = model.dof();
  if (trajectory.dof() != d) throw DimensionError("trajectory does not match hand DoF");
  if (static_cast<int>(plant.gains.size()) != d) throw DimensionError("plant gains do not match hand DoF");
  for (int j = 0; j < d; ++j) {
    if (!(plant.gains[j].kp > 0.0)) {
      throw ConfigError("joint " + model.joints()[j].name + " has a non-positive PD gain");
    }
  }
  const int n = static_cast<int>(std::lround(trajectory.knots() * frequency / fps));
  Eigen::MatrixXd controls(n, d);
  for (int i = 0; i < n; ++i) {
    const double t = trajectory.start_time() + i / frequency;
    const Eigen::VectorXd q = trajectory.Evaluate(t, 0);
    const Eigen::VectorXd tau = InverseDynamics(model, plant, q, trajectory.Evaluate(t, 1),
                                                trajectory.Evaluate(t, 2));
    for (int j = 0; j < d; ++j) controls(i, j) = q[j] + tau[j] / plant.gains[j].kp;
  }
  return controls;
}

Json ControlPlan::ToJson() const {
  Json pt = Json::array();
  for (const PrimaryStep& s : primary) {
    pt.push_back({{"q", dexxfer::ToJson(s.q)},
                  {"qd", dexxfer::ToJson(s.qd)},
                  {"object", PoseToJson(s.object)},
                  {"contact", s.contact}});
  }
  return Json{{"Q", dexxfer::ToJson(joint_trajectory)},
              {"spline", smooth.ToJson()},
              {"A_primary", dexxfer::ToJson(controls)},
              {"F", frequency},
              {"PT", pt}};
}

ControlPlan ControlPlan::FromJson(const Json& j) {
  ControlPlan p;
  p.joint_trajectory = ParseMatrix(RequireField(j, "Q", "plan"), "plan.Q");
  p.smooth = SmoothTrajectory::FromJson(RequireField(j, "spline", "plan"));
  p.controls = ParseMatrix(RequireField(j, "A_primary", "plan"), "plan.A_primary");
  p.frequency = RequireFiniteNumber(RequireField(j, "F", "plan"), "plan.F");
  if (j.contains("PT")) {
    for (const Json& s : j.at("PT")) {
      PrimaryStep step;
      step.q = ParseVector(RequireField(s, "q", "plan.PT"), "plan.PT.q");
      step.qd = ParseVector(RequireField(s, "qd", "plan.PT"), "plan.PT.qd");
      step.object = PoseFromJson(RequireField(s, "object", "plan.PT"), "plan.PT.object");
      step.contact = s.value("contact", false);
      p.primary.push_back(step);
    }
  }
  return p;
}

}  // namespace dexxfer
