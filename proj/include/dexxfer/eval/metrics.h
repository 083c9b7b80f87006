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

#ifndef DEXXFER_EVAL_METRICS_H_
#define DEXXFER_EVAL_METRICS_H_

#include <string>
#include <vector>

#include "dexxfer/common/json_util.h"
#include "dexxfer/geom/pose.h"

namespace dexxfer {

// Object motion labels.
enum SemanticLabel : int {
  kMotionless = 0,
  kLift = 1,
  kFall = 2,
  kTranslation = 3,
  kTilt = 4,
  kRotation = 5,
};

struct SemanticOptions {
  int window = 10;
  int step = 5;
  double translation = 0.03;  // m
  double tilt_deg = 15.0;
  double rotation_deg = 5.0;
};

// Label of one window from its first and last poses. Priority: lift/fall
// (vertical motion at least the threshold and at least the horizontal motion),
// translation, tilt (about world x/y), rotation (about world z).
int ClassifyWindow(const Pose6& first, const Pose6& last, const SemanticOptions& options = {});

// Labels of all sliding windows, in order, before noise removal.
std::vector<int> WindowLabels(const std::vector<Pose6>& trajectory, const SemanticOptions& options = {});

// Window labels with motionless entries removed and repeats collapsed.
// Throws ConfigError when the trajectory is shorter than one window.
std::vector<int> EncodeSemantics(const std::vector<Pose6>& trajectory, const SemanticOptions& options = {});

enum class DtwNormalization { kPathLength, kMaxLength };

struct DtwResult {
  double cost = 0.0;      // mismatches along the optimal path
  int path_length = 0;
  double distance = 0.0;  // normalized
};

// DTW under 0/1 label cost. The optimal path minimizes cost, then length.
DtwResult Dtw(const std::vector<int>& a, const std::vector<int>& b,
              DtwNormalization normalization = DtwNormalization::kPathLength);

inline constexpr double kTsrThreshold = 0.3;

struct TsrResult {
  double distance = 0.0;
  bool success = false;
};

// Both empty: distance 0, success. Exactly one empty: distance 1, failure.
TsrResult Tsr(const std::vector<int>& human, const std::vector<int>& robot,
              DtwNormalization normalization = DtwNormalization::kPathLength);

struct PoseErrors {
  double ep = 0.0;  // m
  double er = 0.0;  // deg
};

// Executed poses are resampled to the reference timeline by nearest index.
PoseErrors EpEr(const std::vector<Pose6>& reference, const std::vector<Pose6>& executed);

bool SrGrasp(double final_distance, int hold_steps, int required_hold_steps, double tolerance = 0.05);
bool SrFollow(bool dropped);

struct MetricReport {
  bool sr_grasp = false;
  bool sr_follow = false;
  double ep = 0.0;
  double er = 0.0;
  bool tsr = false;
  double dtw_distance = 0.0;
  std::vector<int> human_semantics;
  std::vector<int> robot_semantics;

  Json ToJson() const;
  static MetricReport FromJson(const Json& j);
  // One header row and one value row: SR Grasp, SR Follow, Ep, Er, TSR.
  std::string Table() const;
};

struct CorpusSummary {
  int tasks = 0;
  double sr_grasp = 0.0;  // rates in [0, 1]
  double sr_follow = 0.0;
  double ep = 0.0;  // means
  double er = 0.0;
  double tsr = 0.0;

  Json ToJson() const;
  std::string Table() const;
};

CorpusSummary Summarize(const std::vector<MetricReport>& reports);

}  // namespace dexxfer

#endif  // DEXXFER_EVAL_METRICS_H_
