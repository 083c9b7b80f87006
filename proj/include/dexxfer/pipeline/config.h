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

#ifndef DEXXFER_PIPELINE_CONFIG_H_
#define DEXXFER_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "dexxfer/common/json_util.h"
#include "dexxfer/contact/configurator.h"
#include "dexxfer/contact/ppo.h"
#include "dexxfer/eval/metrics.h"
#include "dexxfer/retarget/retargeter.h"
#include "dexxfer/sim/world.h"

namespace dexxfer {

// Everything one transfer run depends on. Relative paths in the file are
// resolved against the file's directory.
struct TransferConfig {
  std::filesystem::path hand;
  std::filesystem::path demo;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  bool no_rl = false;

  // ingest
  double com_lowering = 0.2;
  double contact_threshold = kContactExtractionThreshold;
  std::optional<int> grasp_frame;

  // retarget
  RetargetWeights weights;
  RetargetOptions retarget;
  double control_frequency = 120.0;

  SimConfig sim;
  ConfiguratorOptions contact;
  PpoConfig ppo;
  double wrist_gain_scale = 2.0;

  SemanticOptions semantics;
  DtwNormalization dtw = DtwNormalization::kPathLength;

  // Parses without touching the file system.
  static TransferConfig FromJson(const Json& j, const std::filesystem::path& base_dir);
  static TransferConfig Load(const std::filesystem::path& path);
  // Fully resolved form; FromJson(ToJson(), anything) reproduces the config.
  Json ToJson() const;

  // Pre-flight checks: referenced inputs exist and parameters are sane.
  // Throws ConfigError listing the problem.
  void Validate() const;
};

}  // namespace dexxfer

#endif  // DEXXFER_PIPELINE_CONFIG_H_
