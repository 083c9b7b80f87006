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

#ifndef DEXXFER_CONTACT_MLP_H_
#define DEXXFER_CONTACT_MLP_H_

#include <random>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"

namespace dexxfer {

// Fully connected network with tanh hidden layers and a linear output.
// Batches are column-major: one sample per column.
class Mlp {
 public:
  Mlp() = default;
  // Weights drawn from U(-s, s) with s = gain * sqrt(6 / (fan_in + fan_out));
  // `output_gain` scales the last layer.
  Mlp(const std::vector<int>& sizes, std::mt19937_64& rng, double output_gain = 1.0);

  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  struct Cache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each layer output
  };

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const;
  // Gradient of sum(d_out .* out) with respect to the flattened parameters.
  Eigen::VectorXd Backward(const Cache& cache, const Eigen::MatrixXd& d_out) const;

  int num_parameters() const;
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::VectorXd& p);

  Json ToJson() const;
  static Mlp FromJson(const Json& j);

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

class Adam {
 public:
  explicit Adam(int n = 0, double learning_rate = 3e-4);
  // In-place descent step on `params` along `grad`.
  void Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
};

// Running mean and variance (parallel Welford) used to whiten observations.
class RunningNormalizer {
 public:
  explicit RunningNormalizer(int dim = 0);
  void Update(const Eigen::MatrixXd& batch);  // one sample per column
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd Apply(const Eigen::VectorXd& x) const;

  Json ToJson() const;
  static RunningNormalizer FromJson(const Json& j);

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd m2_;
  double count_ = 0.0;
  double clip_ = 10.0;
};

}  // namespace dexxfer

#endif  // DEXXFER_CONTACT_MLP_H_
