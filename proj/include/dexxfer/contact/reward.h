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

#ifndef DEXXFER_CONTACT_REWARD_H_
#define DEXXFER_CONTACT_REWARD_H_

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/contact/configurator.h"

namespace dexxfer {

// Everything the reward reads from one simulator state.
struct RewardInput {
  std::vector<double> contact_distances;  // mapped fingertip to grasp point, m
  std::vector<double> distal_distances;   // each distal phalanx to the object, m
  int thumb = -1;                         // index into distal_distances
  Eigen::VectorXd q;
  Eigen::VectorXd q_target;
  double lift_height = 0.0;        // m above the episode's start height
  double orientation_error = 0.0;  // rad, to the target
  double position_error = 0.0;     // m, to the target
};

struct RewardTerms {
  double approach = 0.0;
  bool close_enough = false;  // CE
  double contact_count = 0.0;
  double similarity = 0.0;
  double grasp = 0.0;
  bool touched = false;  // HT
  double lift = 0.0;
  double total = 0.0;

  Json ToJson() const;
};

struct RewardResult {
  RewardTerms terms;
  double d_closest = 0.0;
};

// Unified hierarchical reward. `d_closest` is the running minimum of the
// summed grasp-point distances; pass nullopt on the first step.
RewardResult ComputeReward(const RewardInput& in, const RewardConstants& c,
                           std::optional<double> d_closest);

double LiftReward(double h, double orientation_error, double position_error);
double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_REWARD_H_
