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

#include "dexxfer/contact/mlp.h"

#include <cmath>

#include "dexxfer/common/errors.h"

namespace dexxfer {

Mlp::Mlp(const std::vector<int>& sizes, std::mt19937_64& rng, double output_gain) : sizes_(sizes) {
  if (sizes.size() < 2) throw ConfigError("network needs at least an input and an output layer");
  for (int s : sizes) {
    if (s <= 0) throw ConfigError("network layer sizes must be positive");
  }
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double gain = (l + 2 == sizes.size()) ? output_gain : 1.0;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double s = gain * std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (int c = 0; c < in; ++c) {
      for (int r = 0; r < out; ++r) w(r, c) = s * u(rng);
    }
    weights_.push_back(w);
    biases_.push_back(Eigen::VectorXd::Zero(out));
  }
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& x, Cache* cache) const {
  if (x.rows() != input_size()) throw DimensionError("network input has the wrong size");
  if (cache) cache->activations.assign(1, x);
  Eigen::MatrixXd a = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    a = (l + 1 < weights_.size()) ? Eigen::MatrixXd(z.array().tanh()) : z;
    if (cache) cache->activations.push_back(a);
  }
  return a;
}

Eigen::VectorXd Mlp::Backward(const Cache& cache, const Eigen::MatrixXd& d_out) const {
  const size_t n_layers = weights_.size();
  std::vector<Eigen::MatrixXd> dw(n_layers);
  std::vector<Eigen::VectorXd> db(n_layers);
  Eigen::MatrixXd delta = d_out;
  for (size_t k = n_layers; k-- > 0;) {
    if (k + 1 < n_layers) {
      delta = delta.array() * (1.0 - cache.activations[k + 1].array().square());
    }
    dw[k] = delta * cache.activations[k].transpose();
    db[k] = delta.rowwise().sum();
    if (k > 0) delta = weights_[k].transpose() * delta;
  }
  Eigen::VectorXd g(num_parameters());
  Eigen::Index o = 0;
  for (size_t k = 0; k < n_layers; ++k) {
    g.segment(o, dw[k].size()) = Eigen::Map<const Eigen::VectorXd>(dw[k].data(), dw[k].size());
    o += dw[k].size();
    g.segment(o, db[k].size()) = db[k];
    o += db[k].size();
  }
  return g;
}

int Mlp::num_parameters() const {
  Eigen::Index n = 0;
  for (size_t k = 0; k < weights_.size(); ++k) n += weights_[k].size() + biases_[k].size();
  return static_cast<int>(n);
}

Eigen::VectorXd Mlp::Parameters() const {
  Eigen::VectorXd p(num_parameters());
  Eigen::Index o = 0;
  for (size_t k = 0; k < weights_.size(); ++k) {
    p.segment(o, weights_[k].size()) =
        Eigen::Map<const Eigen::VectorXd>(weights_[k].data(), weights_[k].size());
    o += weights_[k].size();
    p.segment(o, biases_[k].size()) = biases_[k];
    o += biases_[k].size();
  }
  return p;
}

void Mlp::SetParameters(const Eigen::VectorXd& p) {
  if (p.size() != num_parameters()) throw DimensionError("parameter vector has the wrong size");
  Eigen::Index o = 0;
  for (size_t k = 0; k < weights_.size(); ++k) {
    weights_[k] = Eigen::Map<const Eigen::MatrixXd>(p.data() + o, weights_[k].rows(), weights_[k].cols());
    o += weights_[k].size();
    biases_[k] = p.segment(o, biases_[k].size());
    o += biases_[k].size();
  }
}

Json Mlp::ToJson() const {
  Json layers = Json::array();
  for (size_t k = 0; k < weights_.size(); ++k) {
    layers.push_back({{"w", dexxfer::ToJson(weights_[k])}, {"b", dexxfer::ToJson(biases_[k])}});
  }
  return Json{{"sizes", sizes_}, {"layers", layers}};
}

Mlp Mlp::FromJson(const Json& j) {
  Mlp m;
  m.sizes_ = RequireField(j, "sizes", "network").get<std::vector<int>>();
  const Json& layers = RequireField(j, "layers", "network");
  if (m.sizes_.size() < 2 || layers.size() + 1 != m.sizes_.size()) {
    throw ParseError("network", "layer count does not match sizes");
  }
  for (size_t k = 0; k < layers.size(); ++k) {
    const std::string where = "network.layers[" + std::to_string(k) + "]";
    Eigen::MatrixXd w = ParseMatrix(RequireField(layers[k], "w", where), where + ".w");
    Eigen::VectorXd b = ParseVector(RequireField(layers[k], "b", where), where + ".b");
    if (w.rows() != m.sizes_[k + 1] || w.cols() != m.sizes_[k] || b.size() != m.sizes_[k + 1]) {
      throw ParseError(where, "shape does not match sizes");
    }
    m.weights_.push_back(w);
    m.biases_.push_back(b);
  }
  return m;
}

Adam::Adam(int n, double learning_rate)
    : lr_(learning_rate), m_(Eigen::VectorXd::Zero(n)), v_(Eigen::VectorXd::Zero(n)) {}

void Adam::Step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) {
    throw DimensionError("optimizer state does not match the parameters");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

RunningNormalizer::RunningNormalizer(int dim)
    : mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::VectorXd::Zero(dim)) {}

void RunningNormalizer::Update(const Eigen::MatrixXd& batch) {
  if (batch.cols() == 0) return;
  if (batch.rows() != mean_.size()) throw DimensionError("normalizer input has the wrong size");
  const double n = static_cast<double>(batch.cols());
  const Eigen::VectorXd bmean = batch.rowwise().mean();
  const Eigen::VectorXd bm2 = (batch.colwise() - bmean).rowwise().squaredNorm();
  const double total = count_ + n;
  const Eigen::VectorXd delta = bmean - mean_;
  mean_ += delta * (n / total);
  m2_ += bm2 + delta.cwiseAbs2() * (count_ * n / total);
  count_ = total;
}

Eigen::MatrixXd RunningNormalizer::Apply(const Eigen::MatrixXd& x) const {
  Eigen::VectorXd inv_std(mean_.size());
  for (Eigen::Index i = 0; i < mean_.size(); ++i) {
    const double var = count_ > 1.0 ? m2_[i] / count_ : 1.0;
    inv_std[i] = 1.0 / std::sqrt(var + 1e-8);
  }
  Eigen::MatrixXd y = (x.colwise() - mean_).array().colwise() * inv_std.array();
  return y.cwiseMax(-clip_).cwiseMin(clip_);
}

Eigen::VectorXd RunningNormalizer::Apply(const Eigen::VectorXd& x) const {
  return Apply(Eigen::MatrixXd(x)).col(0);
}

Json RunningNormalizer::ToJson() const {
  return Json{{"mean", dexxfer::ToJson(mean_)}, {"m2", dexxfer::ToJson(m2_)}, {"count", count_}};
}

RunningNormalizer RunningNormalizer::FromJson(const Json& j) {
  RunningNormalizer n;
  n.mean_ = ParseVector(RequireField(j, "mean", "normalizer"), "normalizer.mean");
  n.m2_ = ParseVector(RequireField(j, "m2", "normalizer"), "normalizer.m2");
  n.count_ = RequireFiniteNumber(RequireField(j, "count", "normalizer"), "normalizer.count");
  if (n.m2_.size() != n.mean_.size()) throw ParseError("normalizer", "mean and m2 differ in size");
  return n;
}

}  // namespace dexxfer
