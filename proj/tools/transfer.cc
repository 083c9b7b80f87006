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

// transfer: command-line front end of the demo-to-robot pipeline.
//
//   transfer run --config <file> [--seed N] [--no-rl] [--resume-from <stage>] [--output <dir>]
//   transfer eval --bundle <dir> [--reference <demo.json>] [--json]
//   transfer report --corpus <dir> [--json]
//
// DEXXFER_WORKERS sets the number of rollout threads used for training.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dexxfer/common/errors.h"
#include "dexxfer/demo/demo.h"
#include "dexxfer/pipeline/pipeline.h"

namespace {

int WorkersFromEnv() {
  const char* v = std::getenv("DEXXFER_WORKERS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 256) throw dexxfer::ConfigError("DEXXFER_WORKERS must be an integer in [1, 256]");
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dexxfer;
  CLI::App app{"Transfer a human hand-object demonstration to a robot hand"};
  app.require_subcommand(1);

  std::string config_path, resume_from, output_dir;
  std::optional<std::uint64_t> seed;
  bool no_rl = false;
  CLI::App* run = app.add_subcommand("run", "Run the full pipeline from a config file");
  run->add_option("--config", config_path, "Config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--no-rl", no_rl, "Skip residual training (primary controls only)");
  run->add_option("--resume-from", resume_from, "Recompute from this stage on")
      ->check(CLI::IsMember(StageNames()));
  run->add_option("--output", output_dir, "Override the output directory");

  std::string bundle_dir, reference_path;
  bool eval_json = false;
  CLI::App* eval = app.add_subcommand("eval", "Recompute the metrics of a finished bundle");
  eval->add_option("--bundle", bundle_dir, "Bundle directory")->required();
  eval->add_option("--reference", reference_path, "Reference demo (default: the run's demo)");
  eval->add_flag("--json", eval_json, "Print JSON instead of a table");

  std::string corpus_dir;
  bool report_json = false;
  CLI::App* report = app.add_subcommand("report", "Summarize every bundle under a directory");
  report->add_option("--corpus", corpus_dir, "Directory of bundles")->required();
  report->add_flag("--json", report_json, "Print JSON instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      TransferConfig cfg = TransferConfig::Load(config_path);
      if (seed) cfg.seed = *seed;
      if (no_rl) cfg.no_rl = true;
      if (!output_dir.empty()) cfg.output_dir = std::filesystem::absolute(output_dir);
      cfg.ppo.workers = WorkersFromEnv();
      RunOptions opts;
      if (!resume_from.empty()) opts.resume_from = resume_from;
      opts.log = &std::cerr;
      const TransferBundle b = RunTransfer(cfg, opts);
      for (const std::string& w : b.manifest.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << b.report.Table();
      std::cerr << "bundle: " << b.dir.string() << "\n";
    } else if (*eval) {
      MetricReport r;
      if (reference_path.empty()) {
        r = EvaluateBundle(bundle_dir);
      } else {
        const std::vector<Pose6> ref = LoadDemo(reference_path).ObjectTrajectory();
        r = EvaluateBundle(bundle_dir, &ref);
      }
      if (eval_json) {
        std::cout << r.ToJson().dump(2) << "\n";
      } else {
        std::cout << r.Table();
      }
    } else if (*report) {
      std::vector<std::string> tasks;
      const CorpusSummary s = ReportCorpus(corpus_dir, &tasks);
      if (report_json) {
        Json j = s.ToJson();
        j["task_dirs"] = tasks;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << s.Table();
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const StageError& e) {
    std::cerr << "stage failed: " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
