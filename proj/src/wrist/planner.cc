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

#include "dexxfer/wrist/planner.h"

#include <cmath>

#include "dexxfer/common/errors.h"
#include "dexxfer/retarget/control_plan.h"
#include "dexxfer/sim/replay.h"

namespace dexxfer {

Json ManipulationPlan::ToJson() const {
  Json objs = Json::array(), wr = Json::array();
  for (const Pose6& p : objects) objs.push_back(PoseToJson(p));
  for (const Pose6& p : wrist) wr.push_back(PoseToJson(p));
  return Json{{"wrist_grasp", PoseToJson(wrist_grasp)},
              {"object_grasp", PoseToJson(object_grasp)},
              {"objects", objs},
              {"wrist", wr},
              {"finger_hold", dexxfer::ToJson(finger_hold)}};
}

ManipulationPlan ManipulationPlan::FromJson(const Json& j) {
  ManipulationPlan p;
  p.wrist_grasp = PoseFromJson(RequireField(j, "wrist_grasp", "manipulation"), "manipulation.wrist_grasp");
  p.object_grasp = PoseFromJson(RequireField(j, "object_grasp", "manipulation"), "manipulation.object_grasp");
  for (const Json& o : RequireField(j, "objects", "manipulation")) {
    p.objects.push_back(PoseFromJson(o, "manipulation.objects"));
  }
  for (const Json& w : RequireField(j, "wrist", "manipulation")) {
    p.wrist.push_back(PoseFromJson(w, "manipulation.wrist"));
  }
  p.finger_hold = ParseVector(RequireField(j, "finger_hold", "manipulation"), "manipulation.finger_hold");
  if (p.objects.size() != p.wrist.size()) throw ParseError("manipulation", "objects and wrist differ in length");
  return p;
}

ManipulationPlan PlanWrist(const std::vector<Pose6>& objects, const Pose6& wrist_grasp,
                           const Eigen::VectorXd& finger_hold) {
  if (objects.empty()) throw ConfigError("cannot plan the wrist along an empty object trajectory");
  ManipulationPlan plan;
  plan.wrist_grasp = wrist_grasp;
  plan.object_grasp = objects.front();
  plan.objects = objects;
  plan.finger_hold = finger_hold;
  // Object-to-wrist transform, fixed by the grasp.
  const Pose6 object_to_wrist = (wrist_grasp.Inverse() * plan.object_grasp).Inverse();
  plan.wrist.reserve(objects.size());
  plan.wrist.push_back(wrist_grasp);
  for (size_t t = 1; t < objects.size(); ++t) plan.wrist.push_back(objects[t] * object_to_wrist);
  return plan;
}

std::vector<Pose6> BlendObjectTrajectory(const Pose6& achieved, const Pose6& anchor,
                                         const std::vector<Pose6>& demo_tail, int blend_steps) {
  std::vector<Pose6> out{achieved};
  out.reserve(demo_tail.size() + 1);
  const Eigen::Vector3d dp = achieved.position - anchor.position;
  const Rotation3 dr = anchor.orientation.Inverse() * achieved.orientation;  // object frame
  for (size_t k = 0; k < demo_tail.size(); ++k) {
    const int t = static_cast<int>(k) + 1;
    if (t >= blend_steps) {
      out.push_back(demo_tail[k]);
      continue;
    }
    const double u = static_cast<double>(t) / blend_steps;
    const double w = 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);  // remaining offset
    Pose6 p;
    p.position = demo_tail[k].position + w * dp;
    p.orientation = demo_tail[k].orientation * Rotation3::Identity().Slerp(dr, w);
    out.push_back(p);
  }
  return out;
}

std::vector<Pose6> TrackingResult::ObjectPoses() const {
  std::vector<Pose6> out;
  out.reserve(states.size());
  for (const WorldState& s : states) out.push_back(s.object.pose);
  return out;
}

TrackingResult TrackManipulation(const ManipulationPlan& plan, const World& world,
                                 const WorldState& start, double gain_scale) {
  const HandModel& hand = world.hand();
  if (!hand.floating_base()) throw ConfigError("wrist tracking needs a floating-base hand");
  const int d = hand.dof();
  if (plan.finger_hold.size() != d - kFloatingBaseDofs) {
    throw DimensionError("finger hold posture does not match the hand");
  }
  if (!(gain_scale > 0.0)) throw ConfigError("wrist gain scale must be positive");

  SimConfig config = world.config();
  config.gains = world.gains();
  for (int i = 0; i < kFloatingBaseDofs; ++i) {
    config.gains[i].kp *= gain_scale;
    config.gains[i].kd *= gain_scale;
  }
  const World tracker = world.WithConfig(config);
  const ActuatorModel plant = PlantOf(tracker);
  const double rate = 1.0 / config.dt;

  // Joint-space wrist targets, unwrapped along the path.
  std::vector<Eigen::VectorXd> targets;
  Eigen::Matrix<double, 6, 1> hint = start.q.head<kFloatingBaseDofs>();
  for (int t = 1; t < plan.length(); ++t) {
    Eigen::VectorXd q(d);
    const Eigen::Matrix<double, 6, 1> w = hand.WristJointsFromPose(plan.wrist[t], hint);
    q.head<kFloatingBaseDofs>() = w;
    q.tail(d - kFloatingBaseDofs) = plan.finger_hold;
    hint = w;
    targets.push_back(q);
  }

  TrackingResult out;
  const int drop_steps = static_cast<int>(std::lround(kDropSeconds / config.dt));
  int free_steps = 0;
  WorldState s = start;
  for (size_t t = 0; t < targets.size(); ++t) {
    const Eigen::VectorXd& q = targets[t];
    Eigen::VectorXd qd = Eigen::VectorXd::Zero(d);
    if (t + 1 < targets.size()) qd.head<kFloatingBaseDofs>() = (targets[t + 1] - q).head<kFloatingBaseDofs>() * rate;
    const Eigen::VectorXd tau = InverseDynamics(hand, plant, q, qd, Eigen::VectorXd::Zero(d));
    Eigen::VectorXd u = q;
    for (int j = 0; j < kFloatingBaseDofs; ++j) u[j] += tau[j] / plant.gains[j].kp;
    try {
      s = tracker.Step(s, u);
    } catch (const SimulationError&) {
      out.diverged = true;
      if (!out.dropped) {
        out.dropped = true;
        out.drop_step = static_cast<int>(t);
      }
      break;
    }
    out.states.push_back(s);
    free_steps = s.HandObjectContact() ? 0 : free_steps + 1;
    if (!out.dropped && free_steps > drop_steps) {
      out.dropped = true;
      out.drop_step = static_cast<int>(t);
    }
  }
  return out;
}

}  // namespace dexxfer
