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

#ifndef DEXXFER_CONTACT_CONFIGURATOR_H_
#define DEXXFER_CONTACT_CONFIGURATOR_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/demo/demo.h"
#include "dexxfer/geom/pose.h"
#include "dexxfer/hand/hand_model.h"
#include "dexxfer/retarget/control_plan.h"

namespace dexxfer {

enum class PregraspStrategy { kThumb, kAll };

struct PregraspTrigger {
  enum class Kind { kNearest, kThreshold };
  Kind kind = Kind::kNearest;
  double threshold = 0.05;  // m, for kThreshold

  static PregraspTrigger Nearest() { return {}; }
  static PregraspTrigger Threshold(double d) { return {Kind::kThreshold, d}; }
};

PregraspStrategy ParsePregraspStrategy(const std::string& s);
PregraspTrigger ParsePregraspTrigger(const Json& j);

// Index of the pre-grasp step given the guide distance and the hand-object
// contact flag of every step. Throws ConfigError when no step qualifies.
int SelectPregraspIndex(const std::vector<double>& guide_distance, const std::vector<bool>& contact,
                        const PregraspTrigger& trigger);

// Demo contacts attached to the robot fingertips that reproduce them.
// Contacts made by human fingers the robot hand has no counterpart for are
// dropped.
struct MappedContacts {
  std::vector<Eigen::Vector3d> points;  // object frame
  std::vector<int> fingertips;          // robot fingertip index per point
  std::vector<int> human_fingers;
  int size() const { return static_cast<int>(points.size()); }
};

MappedContacts MapContacts(const ContactSet& contacts, const HandModel& hand);

// Guide fingertip(s) to their grasp points at one PT step: the thumb's
// distance for kThumb, the mean over all mapped contacts for kAll.
double GuideDistance(const HandModel& hand, const MappedContacts& contacts, const PrimaryStep& step,
                     PregraspStrategy strategy);

struct Pregrasp {
  int index = 0;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  Pose6 object;
};

Pregrasp SelectPregrasp(const std::vector<PrimaryStep>& primary, const HandModel& hand,
                        const MappedContacts& contacts, PregraspStrategy strategy = PregraspStrategy::kThumb,
                        const PregraspTrigger& trigger = PregraspTrigger::Nearest());

struct Goal {
  int frame = 0;
  Pose6 pose;
  bool fallback = false;  // no frame reached the displacement threshold
  std::string warning;
};

// First frame whose position is at least `displacement` from the first
// frame's; falls back to the frame of maximum displacement.
Goal ComputeGoal(const std::vector<Pose6>& trajectory, double displacement = 0.1);

struct RewardConstants {
  double epsilon = 0.06;  // m, CE gate
  double phi = 0.002;     // m, contact predicate
  double alpha_approach = 10.0;
  double alpha_grasp = 10.0;
  double alpha_lift = 20.0;
  double beta_con = 0.5;
  double beta_sim = 0.5;
  // d_closest starts at the first step's distance sum. When false it starts
  // at -infinity, which makes the approach term identically zero.
  bool approach_from_first_step = true;

  Json ToJson() const;
  static RewardConstants FromJson(const Json& j);
};

struct EpisodeConfig {
  int pregrasp_step = 0;
  Eigen::VectorXd q_pre;
  Eigen::VectorXd qd_pre;
  Pose6 object_pre;
  int goal_frame = 0;
  Pose6 target;
  MappedContacts contacts;
  Eigen::VectorXd rho;       // per wrist dimension
  RewardConstants reward;
  Eigen::VectorXd q_target;  // retargeted joints at the grasp frame
  int horizon = 0;
  double delta_max = 0.2;
  double object_jitter = 0.0;  // m, uniform xy offset of the object per seed

  Json ToJson() const;
  static EpisodeConfig FromJson(const Json& j);
};

struct ConfiguratorOptions {
  PregraspStrategy strategy = PregraspStrategy::kThumb;
  PregraspTrigger trigger;
  double goal_displacement = 0.1;
  int grace_steps = 60;
  double rho_translation = 0.05;
  double rho_rotation = 0.3;
  double delta_max = 0.2;
  double object_jitter = 0.0;
  RewardConstants reward;
};

// RL-Configurator: pre-grasp state from PT, goal from the demo, contacts and
// reward constants for the episode.
EpisodeConfig ConfigureEpisode(const ControlPlan& plan, const DemoSequence& demo, const HandModel& hand,
                               const ContactSet& contacts, int grasp_frame,
                               const ConfiguratorOptions& options);

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_CONFIGURATOR_H_
