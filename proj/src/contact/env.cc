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

#include "dexxfer/contact/env.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

#include "dexxfer/common/errors.h"

namespace dexxfer {

namespace {

void AppendPose(Eigen::VectorXd& v, Eigen::Index& o, const Pose6& p) {
  v.segment<3>(o) = p.position;
  Eigen::Quaterniond q = p.orientation.quaternion();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  v.segment<4>(o + 3) << q.w(), q.x(), q.y(), q.z();
  o += 7;
}

}  // namespace

GraspEnv::GraspEnv(const World& world, const ControlPlan& plan, const EpisodeConfig& config)
    : world_(world),
      plan_(plan),
      config_(config),
      scaler_(config.q_pre, config.rho, world.hand().lower_limits(), world.hand().upper_limits()) {
  const int d = world.hand().dof();
  if (plan.controls.cols() != d) throw DimensionError("control plan does not match the hand");
  if (plan.controls.rows() == 0) throw ConfigError("control plan is empty");
  if (config.q_target.size() != d || config.qd_pre.size() != d) {
    throw DimensionError("episode configuration does not match the hand");
  }
  if (config.horizon < 0) throw ConfigError("negative episode horizon");
  for (int tip : config.contacts.fingertips) {
    if (tip < 0 || tip >= world.hand().num_fingertips()) throw ConfigError("contact maps to no fingertip");
  }
}

int GraspEnv::observation_size() const {
  const int n = config_.contacts.size();
  return action_size() + 3 * n + 3 * world_.hand().num_fingertips() + 14 + 3 * n + 2;
}

WorldState GraspEnv::Reset(std::uint64_t seed) const {
  Pose6 object = config_.object_pre;
  if (config_.object_jitter > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-config_.object_jitter, config_.object_jitter);
    object.position.x() += u(rng);
    object.position.y() += u(rng);
  }
  WorldState s = world_.MakeState(config_.q_pre, object);
  s.qd = config_.qd_pre;
  return s;
}

Eigen::VectorXd GraspEnv::Observe(const WorldState& s, int k) const {
  const HandModel& hand = world_.hand();
  const HandKinematics kin = hand.ForwardKinematics(s.q);
  const int n = config_.contacts.size();
  Eigen::VectorXd obs(observation_size());
  Eigen::Index o = 0;
  obs.segment(o, s.q.size()) = s.q;
  o += s.q.size();
  std::vector<Eigen::Vector3d> c(n);
  for (int i = 0; i < n; ++i) {
    c[i] = s.object.pose.TransformPoint(config_.contacts.points[i]);
    obs.segment<3>(o) = c[i];
    o += 3;
  }
  for (int i = 0; i < hand.num_fingertips(); ++i) {
    obs.segment<3>(o) = kin.fingertips.row(i).transpose();
    o += 3;
  }
  AppendPose(obs, o, s.object.pose);
  AppendPose(obs, o, config_.target);
  for (int i = 0; i < n; ++i) {
    obs.segment<3>(o) = kin.fingertips.row(config_.contacts.fingertips[i]).transpose() - c[i];
    o += 3;
  }
  obs[o++] = GeodesicDistance(s.object.pose.orientation, config_.target.orientation);
  obs[o++] = config_.horizon > 0 ? static_cast<double>(k) / config_.horizon : 0.0;
  return obs;
}

Eigen::VectorXd GraspEnv::PrimaryControl(int k) const {
  const Eigen::Index i = std::min<Eigen::Index>(config_.pregrasp_step + 1 + k, plan_.controls.rows() - 1);
  return plan_.controls.row(i).transpose();
}

Eigen::VectorXd GraspEnv::ExecutedControl(int k, const Eigen::VectorXd& delta) const {
  return scaler_.Compose(PrimaryControl(k), delta, config_.delta_max);
}

RewardInput GraspEnv::MeasureReward(const WorldState& s) const {
  const HandModel& hand = world_.hand();
  const HandKinematics kin = hand.ForwardKinematics(s.q);
  RewardInput in;
  for (int i = 0; i < config_.contacts.size(); ++i) {
    const Eigen::Vector3d c = s.object.pose.TransformPoint(config_.contacts.points[i]);
    in.contact_distances.push_back((kin.fingertips.row(config_.contacts.fingertips[i]).transpose() - c).norm());
  }
  for (const LinkDistance& d : world_.CollisionQuery(s)) in.distal_distances.push_back(d.distance);
  in.thumb = hand.thumb_fingertip();
  in.q = s.q;
  in.q_target = config_.q_target;
  in.lift_height = s.object.pose.position.z() - config_.object_pre.position.z();
  in.orientation_error = GeodesicDistance(s.object.pose.orientation, config_.target.orientation);
  in.position_error = (s.object.pose.position - config_.target.position).norm();
  return in;
}

double GraspEnv::GoalDistance(const WorldState& s) const {
  return (s.object.pose.position - config_.target.position).norm();
}

int HoldSteps(const SimConfig& config) {
  return static_cast<int>(std::lround(kHoldSeconds / config.dt));
}

Json EpisodeResult::Summary() const {
  return Json{{"steps", states.size()},        {"return", episode_return},
              {"diverged", diverged},          {"hold_steps", hold_steps},
              {"final_distance", final_distance}, {"success", success}};
}

EpisodeResult Rollout(const GraspEnv& env, const ResidualFn& residual, std::uint64_t seed) {
  EpisodeResult out;
  std::mt19937_64 rng(seed);
  WorldState s = env.Reset(seed);
  std::optional<double> d_closest;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(env.action_size());
  for (int k = 0; k < env.horizon(); ++k) {
    Eigen::VectorXd delta = zero;
    double logp = 0.0;
    if (residual) {
      const Eigen::VectorXd obs = env.Observe(s, k);
      std::tie(delta, logp) = residual(obs, rng);
      out.observations.push_back(obs);
      out.actions.push_back(delta);
      out.log_probs.push_back(logp);
    }
    const Eigen::VectorXd u = env.ExecutedControl(k, delta);
    try {
      s = env.world().Step(s, u);
    } catch (const SimulationError&) {
      out.diverged = true;
      break;
    }
    const RewardResult r = ComputeReward(env.MeasureReward(s), env.config().reward, d_closest);
    d_closest = r.d_closest;
    out.controls.push_back(u);
    out.states.push_back(s);
    out.terms.push_back(r.terms);
    out.episode_return += r.terms.total;
    out.hold_steps = r.terms.touched ? out.hold_steps + 1 : 0;
  }
  if (out.diverged) {
    // The step that failed produced no state or reward.
    if (residual) {
      out.observations.pop_back();
      out.actions.pop_back();
      out.log_probs.pop_back();
    }
    out.success = false;
    out.final_distance = env.GoalDistance(s);
    return out;
  }
  out.final_distance = env.GoalDistance(s);
  out.success = !out.states.empty() && out.final_distance <= kGoalTolerance;
  return out;
}

}  // namespace dexxfer
