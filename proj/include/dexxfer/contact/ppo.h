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

#ifndef DEXXFER_CONTACT_PPO_H_
#define DEXXFER_CONTACT_PPO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/contact/env.h"
#include "dexxfer/contact/mlp.h"

namespace dexxfer {

struct PpoConfig {
  double gamma = 0.995;
  double gae_lambda = 0.95;
  double clip = 0.3;
  int batch_size = 64;  // minibatch
  int epochs = 5;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;
  std::vector<int> hidden{256, 256};
  double init_std = 0.2;
  double reward_scale = 0.01;
  int episodes_per_iteration = 8;
  int iterations = 100;
  int eval_every = 2;
  // Stop after this many consecutive successful evaluations (0 = never).
  int early_stop = 3;
  std::uint64_t seed = 0;
  int workers = 1;

  Json ToJson() const;
  static PpoConfig FromJson(const Json& j);
};

// Diagonal Gaussian over the residual, mean from an MLP on whitened
// observations.
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_size, int act_size, const std::vector<int>& hidden, double init_std,
                 std::mt19937_64& rng);

  int observation_size() const { return mean_.input_size(); }
  int action_size() const { return mean_.output_size(); }

  Eigen::VectorXd Mean(const Eigen::VectorXd& obs) const;
  // Sample and its log probability.
  std::pair<Eigen::VectorXd, double> Sample(const Eigen::VectorXd& obs, std::mt19937_64& rng) const;
  double LogProb(const Eigen::VectorXd& obs, const Eigen::VectorXd& action) const;

  const Mlp& mean_network() const { return mean_; }
  Mlp& mean_network() { return mean_; }
  const Eigen::VectorXd& log_std() const { return log_std_; }
  Eigen::VectorXd& log_std() { return log_std_; }
  const RunningNormalizer& normalizer() const { return normalizer_; }
  RunningNormalizer& normalizer() { return normalizer_; }

  // All trainable parameters: network, then log std.
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::VectorXd& p);

  Json ToJson() const;
  static GaussianPolicy FromJson(const Json& j);
  void Save(const std::filesystem::path& path) const;
  static GaussianPolicy Load(const std::filesystem::path& path);

 private:
  Mlp mean_;
  Eigen::VectorXd log_std_;
  RunningNormalizer normalizer_;
};

// On-policy samples, one per column.
struct PpoBatch {
  Eigen::MatrixXd observations;  // raw
  Eigen::MatrixXd actions;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;
  int size() const { return static_cast<int>(log_probs.size()); }
};

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Generalized advantage estimates for one episode that ends at its last
// reward (terminal or truncated at the horizon).
void ComputeGae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                double lambda, std::vector<double>& advantages, std::vector<double>& returns);

// Clipped-surrogate epochs over shuffled minibatches. Advantages are
// standardized unless their spread is zero.
PpoStats PpoUpdate(GaussianPolicy& policy, Mlp& value, Adam& policy_opt, Adam& value_opt,
                   const PpoBatch& batch, const PpoConfig& config, std::mt19937_64& rng);

struct TrainResult {
  GaussianPolicy policy;
  EpisodeResult best_eval;
  int best_iteration = -1;
  int iterations = 0;
};

// Trains from scratch with rollouts spread over `config.workers` threads.
// Episode seeds do not depend on the worker count. The training log gets one
// JSON object per line, starting with a header of the hyperparameters.
// Throws TrainingError on a non-finite loss.
TrainResult TrainResidualPolicy(const GraspEnv& env, const PpoConfig& config, std::ostream* log);

// Residual for Rollout: the policy mean when `deterministic`, else a sample.
ResidualFn PolicyResidual(const GaussianPolicy& policy, bool deterministic);

// Per-episode seed derived from a run seed and counters.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_PPO_H_
