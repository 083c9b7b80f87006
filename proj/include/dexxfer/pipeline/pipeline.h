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

#ifndef DEXXFER_PIPELINE_PIPELINE_H_
#define DEXXFER_PIPELINE_PIPELINE_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dexxfer/common/json_util.h"
#include "dexxfer/contact/configurator.h"
#include "dexxfer/contact/ppo.h"
#include "dexxfer/eval/metrics.h"
#include "dexxfer/pipeline/config.h"
#include "dexxfer/retarget/control_plan.h"
#include "dexxfer/wrist/planner.h"

namespace dexxfer {

inline constexpr const char* kToolkitVersion = "dexxfer 0.1.0";

// Stage names in execution order.
const std::vector<std::string>& StageNames();
// Throws ConfigError on an unknown name.
int StageIndex(const std::string& name);

struct StageRecord {
  std::string key;  // hash of the stage parameters and upstream artifacts
  double seconds = 0.0;
  bool cached = false;
  std::map<std::string, std::string> files;  // file name -> sha256
};

struct RunManifest {
  std::string version = kToolkitVersion;
  std::string config_hash;
  std::map<std::string, std::string> inputs;  // "hand"/"demo" -> sha256
  std::uint64_t seed = 0;
  bool no_rl = false;
  bool complete = false;
  std::string failed_stage;
  std::string error;
  std::vector<std::string> warnings;
  std::map<std::string, StageRecord> stages;

  Json ToJson() const;
  static RunManifest FromJson(const Json& j);
};

// Everything a run leaves behind, as read back from the output directory.
struct TransferBundle {
  std::filesystem::path dir;
  ControlPlan plan;
  EpisodeConfig episode;
  std::optional<GaussianPolicy> policy;  // absent for --no-rl runs
  EpisodeResult grasp;                   // states and terms only
  ManipulationPlan manipulation;
  TrackingResult tracking;
  std::vector<Pose6> executed;  // object trajectory on the demo timeline
  MetricReport report;
  RunManifest manifest;
};

struct RunOptions {
  // Recompute this stage and everything after it; earlier stages must be
  // present and intact in the output directory.
  std::optional<std::string> resume_from;
  std::ostream* log = nullptr;  // progress lines
};

// Runs ingest -> retarget -> replay -> configure -> train -> plan -> track ->
// evaluate. Stages whose key and files match the existing manifest are
// reused. Failures raise StageError after the manifest records them.
TransferBundle RunTransfer(const TransferConfig& config, const RunOptions& options = {});

// Recomputes the metrics of a bundle from its persisted trajectories. The
// reference defaults to the demo object trajectory named by the bundle's
// config. Throws IntegrityError naming a file that is missing or whose hash
// does not match the manifest.
MetricReport EvaluateBundle(const std::filesystem::path& dir,
                            const std::vector<Pose6>* reference = nullptr);

// Loads a completed bundle. Verifies file hashes like EvaluateBundle.
TransferBundle LoadBundle(const std::filesystem::path& dir);

// Summary over every subdirectory of `dir` holding a metrics.json.
CorpusSummary ReportCorpus(const std::filesystem::path& dir, std::vector<std::string>* tasks = nullptr);

}  // namespace dexxfer

#endif  // DEXXFER_PIPELINE_PIPELINE_H_
