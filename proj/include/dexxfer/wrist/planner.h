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

#ifndef DEXXFER_WRIST_PLANNER_H_
#define DEXXFER_WRIST_PLANNER_H_

#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/geom/pose.h"
#include "dexxfer/sim/world.h"

namespace dexxfer {

// Object contact must be absent this long before the object counts as dropped.
inline constexpr double kDropSeconds = 0.25;

struct ManipulationPlan {
  Pose6 wrist_grasp;   // T_grasp
  Pose6 object_grasp;  // o_grasp
  std::vector<Pose6> objects;  // O_manip, starting with o_grasp
  std::vector<Pose6> wrist;    // T_t per object pose
  Eigen::VectorXd finger_hold;  // finger joint targets held during manipulation

  int length() const { return static_cast<int>(wrist.size()); }
  Json ToJson() const;
  static ManipulationPlan FromJson(const Json& j);
};

// Wrist poses that keep the grasp-time wrist-object transform:
// T_t = o_t (T_grasp^-1 o_grasp)^-1. Throws ConfigError on an empty
// trajectory.
ManipulationPlan PlanWrist(const std::vector<Pose6>& objects, const Pose6& wrist_grasp,
                           const Eigen::VectorXd& finger_hold);

// Manipulation-phase object trajectory: starts at `achieved` (where the grasp
// phase left the object), then follows `demo_tail` (demo frames after the
// anchor frame) with the offset between `achieved` and `anchor` fading out
// under a minimum-jerk profile over `blend_steps` frames. Frames from
// `blend_steps` on equal the demo exactly.
std::vector<Pose6> BlendObjectTrajectory(const Pose6& achieved, const Pose6& anchor,
                                         const std::vector<Pose6>& demo_tail, int blend_steps);

struct TrackingResult {
  std::vector<WorldState> states;  // after each step
  bool dropped = false;
  int drop_step = -1;     // step at which the drop was detected
  bool diverged = false;  // the simulator aborted; counts as a drop

  std::vector<Pose6> ObjectPoses() const;
};

// Follows plan.wrist[1..] with PD position targets (wrist gains scaled by
// `gain_scale`, gravity feedforward) while the fingers hold their grasp
// targets. Starts from `start`, which should be the grasp-time state. A
// diverging step ends tracking early with `dropped` and `diverged` set.
TrackingResult TrackManipulation(const ManipulationPlan& plan, const World& world,
                                 const WorldState& start, double gain_scale = 2.0);

}  // namespace dexxfer

#endif  // DEXXFER_WRIST_PLANNER_H_
