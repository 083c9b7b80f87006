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

#include "dexxfer/sim/replay.h"

namespace dexxfer {

ActuatorModel PlantOf(const World& world) {
  ActuatorModel m;
  m.gains = world.gains();
  m.gravity = world.config().gravity;
  return m;
}

PrimaryStep ToPrimaryStep(const WorldState& s) {
  PrimaryStep p;
  p.q = s.q;
  p.qd = s.qd;
  p.object = s.object.pose;
  p.contact = s.HandObjectContact();
  return p;
}

ReplayResult Replay(const Eigen::MatrixXd& controls, const World& world, const WorldState& initial) {
  ReplayResult out;
  out.final_state = initial;
  for (Eigen::Index t = 0; t < controls.rows(); ++t) {
    out.final_state = world.Step(out.final_state, controls.row(t).transpose());
    out.primary.push_back(ToPrimaryStep(out.final_state));
    out.states.push_back(out.final_state);
  }
  return out;
}

}  // namespace dexxfer
