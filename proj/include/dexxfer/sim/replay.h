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

#ifndef DEXXFER_SIM_REPLAY_H_
#define DEXXFER_SIM_REPLAY_H_

#include <vector>

#include <Eigen/Core>

#include "dexxfer/retarget/control_plan.h"
#include "dexxfer/sim/world.h"

namespace dexxfer {

// Plant seen by ToControlSequence for this world.
ActuatorModel PlantOf(const World& world);

struct ReplayResult {
  std::vector<PrimaryStep> primary;  // one entry per executed control
  std::vector<WorldState> states;    // state after each control
  WorldState final_state;
};

// Executes `controls` open loop from `initial`. SimulationError propagates
// with the failing step.
ReplayResult Replay(const Eigen::MatrixXd& controls, const World& world, const WorldState& initial);

PrimaryStep ToPrimaryStep(const WorldState& s);

}  // namespace dexxfer

#endif  // DEXXFER_SIM_REPLAY_H_
