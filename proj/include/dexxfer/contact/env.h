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

#ifndef DEXXFER_CONTACT_ENV_H_
#define DEXXFER_CONTACT_ENV_H_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/contact/action.h"
#include "dexxfer/contact/configurator.h"
#include "dexxfer/contact/reward.h"
#include "dexxfer/retarget/control_plan.h"
#include "dexxfer/sim/world.h"

namespace dexxfer {

// Success radius around the goal position.
inline constexpr double kGoalTolerance = 0.05;
// Grasp must be held this long at the end of the episode.
inline constexpr double kHoldSeconds = 0.5;

// Grasp-phase episode: starts at the pre-grasp state and replays A_primary
// from the following step, corrected by a residual in normalized action space.
class GraspEnv {
 public:
  GraspEnv(const World& world, const ControlPlan& plan, const EpisodeConfig& config);

  const World& world() const { return world_; }
  const EpisodeConfig& config() const { return config_; }
  const ActionScaler& scaler() const { return scaler_; }
  int horizon() const { return config_.horizon; }
  int action_size() const { return world_.hand().dof(); }
  int observation_size() const;

  // Pre-grasp state; the object's xy position is jittered from `seed`.
  WorldState Reset(std::uint64_t seed) const;
  Eigen::VectorXd Observe(const WorldState& s, int k) const;
  // Primary control of episode step k (held at the last one past the end).
  Eigen::VectorXd PrimaryControl(int k) const;
  Eigen::VectorXd ExecutedControl(int k, const Eigen::VectorXd& delta) const;
  RewardInput MeasureReward(const WorldState& s) const;
  double GoalDistance(const WorldState& s) const;

 private:
  const World& world_;
  const ControlPlan& plan_;
  EpisodeConfig config_;
  ActionScaler scaler_;
};

struct EpisodeResult {
  std::vector<WorldState> states;  // after each step
  std::vector<Eigen::VectorXd> controls;
  std::vector<Eigen::VectorXd> observations;  // before each step
  std::vector<Eigen::VectorXd> actions;       // raw residual samples
  std::vector<double> log_probs;
  std::vector<RewardTerms> terms;
  double episode_return = 0.0;
  bool diverged = false;
  int hold_steps = 0;  // trailing steps with thumb and another finger touching
  double final_distance = 0.0;
  bool success = false;  // final_distance <= kGoalTolerance

  Json Summary() const;
};

// Residual source for a rollout: returns (delta, log probability).
using ResidualFn = std::function<std::pair<Eigen::VectorXd, double>(const Eigen::VectorXd& obs,
                                                                    std::mt19937_64& rng)>;

// Deterministic for a given seed. A null `residual` rolls out the primary
// plan alone (delta = 0).
EpisodeResult Rollout(const GraspEnv& env, const ResidualFn& residual, std::uint64_t seed);

// Control steps corresponding to kHoldSeconds.
int HoldSteps(const SimConfig& config);

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_ENV_H_
