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

#include "dexxfer/contact/ppo.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <thread>

#include "dexxfer/common/errors.h"

namespace dexxfer {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void ClipNorm(Eigen::VectorXd& g, double max_norm) {
  const double n = g.norm();
  if (max_norm > 0.0 && n > max_norm) g *= max_norm / n;
}

bool Finite(double x) { return std::isfinite(x); }

// Evaluation ordering: held grasp, then goal reached, then return.
bool Better(const EpisodeResult& a, const EpisodeResult& b, int hold) {
  const bool ga = a.success && a.hold_steps >= hold;
  const bool gb = b.success && b.hold_steps >= hold;
  if (ga != gb) return ga;
  if (a.success != b.success) return a.success;
  return a.episode_return > b.episode_return;
}

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return SplitMix(SplitMix(SplitMix(seed) ^ a) ^ b);
}

Json PpoConfig::ToJson() const {
  return Json{{"gamma", gamma},
              {"gae_lambda", gae_lambda},
              {"clip", clip},
              {"batch_size", batch_size},
              {"epochs", epochs},
              {"policy_lr", policy_lr},
              {"value_lr", value_lr},
              {"entropy_coef", entropy_coef},
              {"max_grad_norm", max_grad_norm},
              {"hidden", hidden},
              {"init_std", init_std},
              {"reward_scale", reward_scale},
              {"episodes_per_iteration", episodes_per_iteration},
              {"iterations", iterations},
              {"eval_every", eval_every},
              {"early_stop", early_stop},
              {"seed", seed}};
}

PpoConfig PpoConfig::FromJson(const Json& j) {
  PpoConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.gae_lambda = j.value("gae_lambda", c.gae_lambda);
  c.clip = j.value("clip", c.clip);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.policy_lr = j.value("policy_lr", c.policy_lr);
  c.value_lr = j.value("value_lr", c.value_lr);
  c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
  c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  c.hidden = j.value("hidden", c.hidden);
  c.init_std = j.value("init_std", c.init_std);
  c.reward_scale = j.value("reward_scale", c.reward_scale);
  c.episodes_per_iteration = j.value("episodes_per_iteration", c.episodes_per_iteration);
  c.iterations = j.value("iterations", c.iterations);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.early_stop = j.value("early_stop", c.early_stop);
  c.seed = j.value("seed", c.seed);
  if (!(c.gamma > 0.0 && c.gamma <= 1.0) || !(c.clip > 0.0) || c.batch_size <= 0 || c.epochs <= 0 ||
      c.episodes_per_iteration <= 0 || c.iterations < 0 || c.eval_every <= 0 || !(c.init_std > 0.0)) {
    throw ConfigError("invalid PPO hyperparameters");
  }
  return c;
}

GaussianPolicy::GaussianPolicy(int obs_size, int act_size, const std::vector<int>& hidden,
                               double init_std, std::mt19937_64& rng)
    : log_std_(Eigen::VectorXd::Constant(act_size, std::log(init_std))), normalizer_(obs_size) {
  std::vector<int> sizes{obs_size};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(act_size);
  mean_ = Mlp(sizes, rng, 0.01);
}

Eigen::VectorXd GaussianPolicy::Mean(const Eigen::VectorXd& obs) const {
  return mean_.Forward(normalizer_.Apply(obs)).col(0);
}

std::pair<Eigen::VectorXd, double> GaussianPolicy::Sample(const Eigen::VectorXd& obs,
                                                          std::mt19937_64& rng) const {
  const Eigen::VectorXd mu = Mean(obs);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd a(mu.size());
  double logp = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double z = n(rng);
    a[i] = mu[i] + std::exp(log_std_[i]) * z;
    logp += -0.5 * z * z - log_std_[i] - kHalfLog2Pi;
  }
  return {a, logp};
}

double GaussianPolicy::LogProb(const Eigen::VectorXd& obs, const Eigen::VectorXd& action) const {
  const Eigen::VectorXd mu = Mean(obs);
  double logp = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double z = (action[i] - mu[i]) / std::exp(log_std_[i]);
    logp += -0.5 * z * z - log_std_[i] - kHalfLog2Pi;
  }
  return logp;
}

Eigen::VectorXd GaussianPolicy::Parameters() const {
  const Eigen::VectorXd net = mean_.Parameters();
  Eigen::VectorXd p(net.size() + log_std_.size());
  p << net, log_std_;
  return p;
}

void GaussianPolicy::SetParameters(const Eigen::VectorXd& p) {
  const int n = mean_.num_parameters();
  if (p.size() != n + log_std_.size()) throw DimensionError("policy parameter vector has the wrong size");
  mean_.SetParameters(p.head(n));
  log_std_ = p.tail(log_std_.size());
}

Json GaussianPolicy::ToJson() const {
  return Json{{"format", "dexxfer-policy-v1"},
              {"mean", mean_.ToJson()},
              {"log_std", dexxfer::ToJson(log_std_)},
              {"normalizer", normalizer_.ToJson()}};
}

GaussianPolicy GaussianPolicy::FromJson(const Json& j) {
  if (j.value("format", std::string()) != "dexxfer-policy-v1") {
    throw ParseError("policy", "unknown checkpoint format");
  }
  GaussianPolicy p;
  p.mean_ = Mlp::FromJson(RequireField(j, "mean", "policy"));
  p.log_std_ = ParseVector(RequireField(j, "log_std", "policy"), "policy.log_std");
  p.normalizer_ = RunningNormalizer::FromJson(RequireField(j, "normalizer", "policy"));
  if (p.log_std_.size() != p.mean_.output_size()) throw ParseError("policy", "log_std size mismatch");
  return p;
}

void GaussianPolicy::Save(const std::filesystem::path& path) const { WriteJsonFile(path, ToJson(), -1); }

GaussianPolicy GaussianPolicy::Load(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path));
}

void ComputeGae(const std::vector<double>& rewards, const std::vector<double>& values, double gamma,
                double lambda, std::vector<double>& advantages, std::vector<double>& returns) {
  const size_t n = rewards.size();
  if (values.size() != n) throw DimensionError("rewards and values differ in length");
  advantages.assign(n, 0.0);
  returns.assign(n, 0.0);
  double gae = 0.0;
  for (size_t k = n; k-- > 0;) {
    const double next = k + 1 < n ? values[k + 1] : 0.0;
    const double delta = rewards[k] + gamma * next - values[k];
    gae = delta + gamma * lambda * gae;
    advantages[k] = gae;
    returns[k] = gae + values[k];
  }
}

PpoStats PpoUpdate(GaussianPolicy& policy, Mlp& value, Adam& policy_opt, Adam& value_opt,
                   const PpoBatch& batch, const PpoConfig& config, std::mt19937_64& rng) {
  PpoStats stats;
  const int n = batch.size();
  if (n == 0) return stats;
  Eigen::VectorXd adv = batch.advantages;
  const double mean = adv.mean();
  const double sd = std::sqrt((adv.array() - mean).square().mean());
  if (sd > 1e-8) adv = (adv.array() - mean) / sd;

  const Eigen::MatrixXd x = policy.normalizer().Apply(batch.observations);
  const int d = policy.action_size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  int updates = 0;
  double clipped = 0.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += config.batch_size) {
      const int m = std::min(config.batch_size, n - start);
      Eigen::MatrixXd xb(x.rows(), m), ab(d, m);
      Eigen::VectorXd lp_old(m), ab_adv(m), rb(m);
      for (int i = 0; i < m; ++i) {
        const int s = order[start + i];
        xb.col(i) = x.col(s);
        ab.col(i) = batch.actions.col(s);
        lp_old[i] = batch.log_probs[s];
        ab_adv[i] = adv[s];
        rb[i] = batch.returns[s];
      }

      // Policy.
      Mlp::Cache cache;
      const Eigen::MatrixXd mu = policy.mean_network().Forward(xb, &cache);
      const Eigen::ArrayXd inv_var = (-2.0 * policy.log_std().array()).exp();
      Eigen::MatrixXd d_mu(d, m);
      Eigen::VectorXd d_log_std = Eigen::VectorXd::Constant(d, -config.entropy_coef);
      double loss = 0.0;
      for (int i = 0; i < m; ++i) {
        const Eigen::ArrayXd diff = (ab.col(i) - mu.col(i)).array();
        const Eigen::ArrayXd z2 = diff.square() * inv_var;
        const double logp = (-0.5 * z2 - policy.log_std().array() - kHalfLog2Pi).sum();
        const double ratio = std::exp(logp - lp_old[i]);
        const double a = ab_adv[i];
        const double clipped_ratio = std::clamp(ratio, 1.0 - config.clip, 1.0 + config.clip);
        loss -= std::min(ratio * a, clipped_ratio * a) / m;
        const bool inactive = (a > 0.0 && ratio > 1.0 + config.clip) || (a < 0.0 && ratio < 1.0 - config.clip);
        if (inactive) clipped += 1.0;
        const double g = inactive ? 0.0 : -a * ratio / m;  // dloss/dlogp
        d_mu.col(i) = g * (diff * inv_var).matrix();
        d_log_std += g * (z2 - 1.0).matrix();
      }
      const double entropy = (policy.log_std().array() + 0.5 + kHalfLog2Pi).sum();
      loss -= config.entropy_coef * entropy;
      Eigen::VectorXd grad(policy.Parameters().size());
      grad << policy.mean_network().Backward(cache, d_mu), d_log_std;
      ClipNorm(grad, config.max_grad_norm);
      Eigen::VectorXd params = policy.Parameters();
      policy_opt.Step(params, grad);
      policy.SetParameters(params);

      // Value.
      Mlp::Cache vcache;
      const Eigen::MatrixXd v = value.Forward(xb, &vcache);
      const Eigen::RowVectorXd err = v.row(0) - rb.transpose();
      const double vloss = 0.5 * err.squaredNorm() / m;
      Eigen::VectorXd vgrad = value.Backward(vcache, err / m);
      ClipNorm(vgrad, config.max_grad_norm);
      Eigen::VectorXd vparams = value.Parameters();
      value_opt.Step(vparams, vgrad);
      value.SetParameters(vparams);

      if (!Finite(loss) || !Finite(vloss) || !params.allFinite() || !vparams.allFinite()) {
        throw TrainingError("non-finite loss during the policy update");
      }
      stats.policy_loss += loss;
      stats.value_loss += vloss;
      stats.entropy += entropy;
      ++updates;
    }
  }
  stats.policy_loss /= updates;
  stats.value_loss /= updates;
  stats.entropy /= updates;
  stats.clip_fraction = clipped / (static_cast<double>(n) * config.epochs);
  return stats;
}

ResidualFn PolicyResidual(const GaussianPolicy& policy, bool deterministic) {
  if (deterministic) {
    return [&policy](const Eigen::VectorXd& obs, std::mt19937_64&) {
      return std::make_pair(policy.Mean(obs), 0.0);
    };
  }
  return [&policy](const Eigen::VectorXd& obs, std::mt19937_64& rng) { return policy.Sample(obs, rng); };
}

TrainResult TrainResidualPolicy(const GraspEnv& env, const PpoConfig& config, std::ostream* log) {
  std::mt19937_64 rng(DeriveSeed(config.seed, 0x5eed));
  const int obs_size = env.observation_size();
  GaussianPolicy policy(obs_size, env.action_size(), config.hidden, config.init_std, rng);
  std::vector<int> vsizes{obs_size};
  vsizes.insert(vsizes.end(), config.hidden.begin(), config.hidden.end());
  vsizes.push_back(1);
  Mlp value(vsizes, rng, 1.0);
  Adam policy_opt(static_cast<int>(policy.Parameters().size()), config.policy_lr);
  Adam value_opt(value.num_parameters(), config.value_lr);
  const int hold = HoldSteps(env.world().config());

  if (log) {
    Json header = config.ToJson();
    header["algorithm"] = "ppo";
    header["observation_size"] = obs_size;
    header["action_size"] = env.action_size();
    header["horizon"] = env.horizon();
    *log << Json{{"header", header}}.dump() << "\n";
  }

  TrainResult result;
  result.policy = policy;
  bool have_best = false;
  int streak = 0;
  const int workers = std::max(1, config.workers);
  for (int it = 0; it < config.iterations; ++it) {
    const int n_ep = config.episodes_per_iteration;
    std::vector<EpisodeResult> episodes(n_ep);
    const ResidualFn sample = PolicyResidual(policy, false);
    auto run = [&](int w) {
      for (int e = w; e < n_ep; e += workers) {
        episodes[e] = Rollout(env, sample, DeriveSeed(config.seed, it + 1, e));
      }
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
      for (auto& t : threads) t.join();
    }

    int total = 0;
    for (const auto& ep : episodes) total += static_cast<int>(ep.actions.size());
    PpoBatch batch;
    batch.observations.resize(obs_size, total);
    batch.actions.resize(env.action_size(), total);
    batch.log_probs.resize(total);
    batch.advantages.resize(total);
    batch.returns.resize(total);
    int col = 0;
    double mean_return = 0.0;
    double successes = 0.0;
    Json component_means = {{"approach", 0.0}, {"con", 0.0}, {"sim", 0.0}, {"lift", 0.0}, {"ce", 0.0}, {"ht", 0.0}};
    for (const auto& ep : episodes) {
      const int len = static_cast<int>(ep.actions.size());
      if (len == 0) continue;
      Eigen::MatrixXd obs(obs_size, len);
      for (int k = 0; k < len; ++k) obs.col(k) = ep.observations[k];
      const Eigen::MatrixXd v = value.Forward(policy.normalizer().Apply(obs));
      std::vector<double> rewards(len), values(len), adv, ret;
      for (int k = 0; k < len; ++k) {
        rewards[k] = config.reward_scale * ep.terms[k].total;
        values[k] = v(0, k);
        component_means["approach"] = component_means["approach"].get<double>() + ep.terms[k].approach / total;
        component_means["con"] = component_means["con"].get<double>() + ep.terms[k].contact_count / total;
        component_means["sim"] = component_means["sim"].get<double>() + ep.terms[k].similarity / total;
        component_means["lift"] = component_means["lift"].get<double>() + ep.terms[k].lift / total;
        component_means["ce"] = component_means["ce"].get<double>() + (ep.terms[k].close_enough ? 1.0 : 0.0) / total;
        component_means["ht"] = component_means["ht"].get<double>() + (ep.terms[k].touched ? 1.0 : 0.0) / total;
      }
      ComputeGae(rewards, values, config.gamma, config.gae_lambda, adv, ret);
      for (int k = 0; k < len; ++k, ++col) {
        batch.observations.col(col) = ep.observations[k];
        batch.actions.col(col) = ep.actions[k];
        batch.log_probs[col] = ep.log_probs[k];
        batch.advantages[col] = adv[k];
        batch.returns[col] = ret[k];
      }
      mean_return += ep.episode_return / n_ep;
      successes += ep.success ? 1.0 : 0.0;
    }

    const PpoStats stats = PpoUpdate(policy, value, policy_opt, value_opt, batch, config, rng);
    policy.normalizer().Update(batch.observations);
    result.iterations = it + 1;

    Json line{{"iteration", it},
              {"mean_return", mean_return},
              {"success_rate", successes / n_ep},
              {"components", component_means},
              {"policy_loss", stats.policy_loss},
              {"value_loss", stats.value_loss},
              {"clip_fraction", stats.clip_fraction}};

    if ((it + 1) % config.eval_every == 0 || it + 1 == config.iterations) {
      EpisodeResult eval = Rollout(env, PolicyResidual(policy, true), config.seed);
      line["eval"] = eval.Summary();
      const bool held = eval.success && eval.hold_steps >= hold;
      streak = held ? streak + 1 : 0;
      if (!have_best || Better(eval, result.best_eval, hold)) {
        result.policy = policy;
        result.best_eval = std::move(eval);
        result.best_iteration = it;
        have_best = true;
      }
    }
    if (log) *log << line.dump() << "\n";
    if (config.early_stop > 0 && streak >= config.early_stop) break;
  }
  if (!have_best) {
    result.policy = policy;
    result.best_eval = Rollout(env, PolicyResidual(result.policy, true), config.seed);
  }
  return result;
}

}  // namespace dexxfer
