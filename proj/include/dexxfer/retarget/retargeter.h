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

#ifndef DEXXFER_RETARGET_RETARGETER_H_
#define DEXXFER_RETARGET_RETARGETER_H_

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/demo/demo.h"
#include "dexxfer/hand/hand_model.h"

namespace dexxfer {

// Weights of the fingertip, palm-orientation and smoothness terms.
struct RetargetWeights {
  double fingertip = 1.0;
  double orientation = 0.1;
  double smoothness = 0.05;
};

struct RetargetOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  // Align the floating base to the human fingertips before solving the first
  // frame of a sequence.
  bool align_first_frame = true;
};

struct RetargetResult {
  Eigen::VectorXd q;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// w_f * sum ||v_H - v_R(q)||^2 + w_o * G(M_H, M_R(q))^2 + w_s * ||q - q_prev||^2.
// The orientation term is the squared geodesic angle between palm normals.
double RetargetObjective(const HandModel& model, const HumanFrame& h, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& q_prev, const RetargetWeights& w);

// Damped Gauss-Newton (Levenberg-Marquardt) with box projection onto the joint
// limits, started at q_prev. Never returns an iterate worse than q_prev.
RetargetResult RetargetFrame(const HandModel& model, const HumanFrame& h,
                             const Eigen::VectorXd& q_prev, const RetargetWeights& w,
                             const RetargetOptions& options = {});

// Mid-range joints with the floating base rigidly aligned to the human
// fingertips and palm normal (Kabsch/Wahba). Non-floating hands get mid-range.
Eigen::VectorXd InitialGuess(const HandModel& model, const HumanFrame& h);

struct RetargetedSequence {
  Eigen::MatrixXd q;  // T x D
  std::vector<bool> converged;
  std::vector<int> iterations;
  bool all_converged() const;
};

// Frame-sequential solve; frame t is warm-started from frame t-1. The first
// frame has no predecessor, so its smoothness term is inactive.
RetargetedSequence RetargetSequence(const HandModel& model, const std::vector<HumanFrame>& frames,
                                    const RetargetWeights& w, const RetargetOptions& options = {});

// Human trajectory of a demo.
std::vector<HumanFrame> HumanTrajectory(const DemoSequence& demo);

// Human frame produced by the robot hand itself at q (mapped fingers only,
// unmapped fingers copied from the robot's first tip). Test/fixture helper.
HumanFrame HumanFrameFromRobot(const HandModel& model, const Eigen::VectorXd& q);

}  // namespace dexxfer

#endif  // DEXXFER_RETARGET_RETARGETER_H_
