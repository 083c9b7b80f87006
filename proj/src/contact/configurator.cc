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

#include "dexxfer/contact/configurator.h"

#include <algorithm>
#include <cmath>

#include "dexxfer/common/errors.h"

namespace dexxfer {

PregraspStrategy ParsePregraspStrategy(const std::string& s) {
  if (s == "thumb") return PregraspStrategy::kThumb;
  if (s == "all") return PregraspStrategy::kAll;
  throw ConfigError("unknown pre-grasp strategy '" + s + "' (expected thumb or all)");
}

PregraspTrigger ParsePregraspTrigger(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "nearest") return PregraspTrigger::Nearest();
  if (j.is_object() && j.contains("threshold")) {
    const double d = RequireFiniteNumber(j.at("threshold"), "trigger.threshold");
    if (d <= 0.0) throw ConfigError("pre-grasp trigger threshold must be positive");
    return PregraspTrigger::Threshold(d);
  }
  throw ConfigError("pre-grasp trigger must be \"nearest\" or {\"threshold\": d}");
}

int SelectPregraspIndex(const std::vector<double>& guide_distance, const std::vector<bool>& contact,
                        const PregraspTrigger& trigger) {
  if (guide_distance.size() != contact.size()) {
    throw DimensionError("guide distances and contact flags differ in length");
  }
  int best = -1;
  for (size_t t = 0; t < contact.size(); ++t) {
    if (contact[t]) continue;
    if (trigger.kind == PregraspTrigger::Kind::kThreshold) {
      if (guide_distance[t] <= trigger.threshold) return static_cast<int>(t);
    } else if (best < 0 || guide_distance[t] < guide_distance[best]) {
      best = static_cast<int>(t);
    }
  }
  if (best < 0) {
    if (trigger.kind == PregraspTrigger::Kind::kThreshold) {
      throw ConfigError("no contact-free step has its guide fingertip within the trigger threshold");
    }
    throw ConfigError("primary trajectory has no contact-free step to start from");
  }
  return best;
}

MappedContacts MapContacts(const ContactSet& contacts, const HandModel& hand) {
  MappedContacts out;
  const auto& corr = hand.correspondence();
  for (int i = 0; i < contacts.size(); ++i) {
    auto it = corr.find(contacts.finger_ids[i]);
    if (it == corr.end()) continue;
    out.points.push_back(contacts.points[i]);
    out.fingertips.push_back(it->second);
    out.human_fingers.push_back(contacts.finger_ids[i]);
  }
  if (out.size() == 0) throw ContactError("no demo contact maps onto a robot fingertip");
  return out;
}

double GuideDistance(const HandModel& hand, const MappedContacts& contacts, const PrimaryStep& step,
                     PregraspStrategy strategy) {
  const HandKinematics kin = hand.ForwardKinematics(step.q);
  double sum = 0.0;
  int n = 0;
  for (int i = 0; i < contacts.size(); ++i) {
    if (strategy == PregraspStrategy::kThumb && contacts.human_fingers[i] != 0) continue;
    const Eigen::Vector3d c = step.object.TransformPoint(contacts.points[i]);
    sum += (kin.fingertips.row(contacts.fingertips[i]).transpose() - c).norm();
    ++n;
  }
  if (n == 0) throw ConfigError("thumb-guided pre-grasp needs a thumb contact");
  return sum / n;
}

Pregrasp SelectPregrasp(const std::vector<PrimaryStep>& primary, const HandModel& hand,
                        const MappedContacts& contacts, PregraspStrategy strategy,
                        const PregraspTrigger& trigger) {
  std::vector<double> dist;
  std::vector<bool> flags;
  for (const PrimaryStep& s : primary) {
    dist.push_back(GuideDistance(hand, contacts, s, strategy));
    flags.push_back(s.contact);
  }
  const int i = SelectPregraspIndex(dist, flags, trigger);
  return Pregrasp{i, primary[i].q, primary[i].qd, primary[i].object};
}

Goal ComputeGoal(const std::vector<Pose6>& trajectory, double displacement) {
  if (trajectory.empty()) throw ConfigError("empty object trajectory");
  Goal g;
  const Eigen::Vector3d start = trajectory.front().position;
  double max_dev = -1.0;
  for (size_t t = 0; t < trajectory.size(); ++t) {
    const double dev = (trajectory[t].position - start).norm();
    if (dev >= displacement) {
      g.frame = static_cast<int>(t);
      g.pose = trajectory[t];
      return g;
    }
    if (dev > max_dev) {
      max_dev = dev;
      g.frame = static_cast<int>(t);
    }
  }
  g.pose = trajectory[g.frame];
  g.fallback = true;
  g.warning = "object never moves " + std::to_string(displacement) +
              " m; using the frame of maximum displacement (" + std::to_string(max_dev) + " m)";
  return g;
}

Json RewardConstants::ToJson() const {
  return Json{{"epsilon", epsilon},       {"phi", phi},
              {"alpha", {alpha_approach, alpha_grasp, alpha_lift}},
              {"beta_con", beta_con},     {"beta_sim", beta_sim},
              {"approach_from_first_step", approach_from_first_step}};
}

RewardConstants RewardConstants::FromJson(const Json& j) {
  RewardConstants c;
  c.epsilon = j.value("epsilon", c.epsilon);
  c.phi = j.value("phi", c.phi);
  if (j.contains("alpha")) {
    const Eigen::VectorXd a = ParseVector(j.at("alpha"), "reward.alpha");
    if (a.size() != 3) throw ConfigError("reward.alpha needs three values");
    c.alpha_approach = a[0];
    c.alpha_grasp = a[1];
    c.alpha_lift = a[2];
  }
  c.beta_con = j.value("beta_con", c.beta_con);
  c.beta_sim = j.value("beta_sim", c.beta_sim);
  c.approach_from_first_step = j.value("approach_from_first_step", c.approach_from_first_step);
  if (!(c.epsilon > 0.0) || !(c.phi > 0.0)) throw ConfigError("reward thresholds must be positive");
  return c;
}

Json EpisodeConfig::ToJson() const {
  Json pts = Json::array(), tips = Json::array(), fingers = Json::array();
  for (int i = 0; i < contacts.size(); ++i) {
    pts.push_back(dexxfer::ToJson(contacts.points[i]));
    tips.push_back(contacts.fingertips[i]);
    fingers.push_back(contacts.human_fingers[i]);
  }
  return Json{{"pregrasp_step", pregrasp_step},
              {"q_pre", dexxfer::ToJson(q_pre)},
              {"qd_pre", dexxfer::ToJson(qd_pre)},
              {"object_pre", PoseToJson(object_pre)},
              {"goal_frame", goal_frame},
              {"target", PoseToJson(target)},
              {"contacts", {{"points", pts}, {"fingertips", tips}, {"human_fingers", fingers}}},
              {"rho", dexxfer::ToJson(rho)},
              {"reward", reward.ToJson()},
              {"q_target", dexxfer::ToJson(q_target)},
              {"horizon", horizon},
              {"delta_max", delta_max},
              {"object_jitter", object_jitter}};
}

EpisodeConfig EpisodeConfig::FromJson(const Json& j) {
  const std::string w = "episode";
  EpisodeConfig c;
  c.pregrasp_step = RequireField(j, "pregrasp_step", w).get<int>();
  c.q_pre = ParseVector(RequireField(j, "q_pre", w), w + ".q_pre");
  c.qd_pre = ParseVector(RequireField(j, "qd_pre", w), w + ".qd_pre");
  c.object_pre = PoseFromJson(RequireField(j, "object_pre", w), w + ".object_pre");
  c.goal_frame = RequireField(j, "goal_frame", w).get<int>();
  c.target = PoseFromJson(RequireField(j, "target", w), w + ".target");
  const Json& cj = RequireField(j, "contacts", w);
  for (const Json& p : RequireField(cj, "points", w + ".contacts")) {
    c.contacts.points.push_back(ParseVec3(p, w + ".contacts.points"));
  }
  c.contacts.fingertips = RequireField(cj, "fingertips", w + ".contacts").get<std::vector<int>>();
  c.contacts.human_fingers = RequireField(cj, "human_fingers", w + ".contacts").get<std::vector<int>>();
  if (c.contacts.fingertips.size() != c.contacts.points.size() ||
      c.contacts.human_fingers.size() != c.contacts.points.size()) {
    throw ParseError(w + ".contacts", "points, fingertips and human_fingers differ in length");
  }
  c.rho = ParseVector(RequireField(j, "rho", w), w + ".rho");
  c.reward = RewardConstants::FromJson(RequireField(j, "reward", w));
  c.q_target = ParseVector(RequireField(j, "q_target", w), w + ".q_target");
  c.horizon = RequireField(j, "horizon", w).get<int>();
  c.delta_max = RequireFiniteNumber(RequireField(j, "delta_max", w), w + ".delta_max");
  c.object_jitter = j.value("object_jitter", 0.0);
  return c;
}

EpisodeConfig ConfigureEpisode(const ControlPlan& plan, const DemoSequence& demo, const HandModel& hand,
                               const ContactSet& contacts, int grasp_frame,
                               const ConfiguratorOptions& options) {
  if (!(options.rho_translation > 0.0) || !(options.rho_rotation > 0.0)) {
    throw ConfigError("wrist neighborhood radius must be positive");
  }
  if (plan.primary.empty()) throw ConfigError("control plan has no primary trajectory");
  EpisodeConfig c;
  c.contacts = MapContacts(contacts, hand);
  const Pregrasp pre = SelectPregrasp(plan.primary, hand, c.contacts, options.strategy, options.trigger);
  c.pregrasp_step = pre.index;
  c.q_pre = pre.q;
  c.qd_pre = pre.qd;
  c.object_pre = pre.object;

  const Goal goal = ComputeGoal(demo.ObjectTrajectory(), options.goal_displacement);
  c.goal_frame = goal.frame;
  c.target = goal.pose;
  const int goal_step = static_cast<int>(std::lround(goal.frame * plan.frequency / demo.fps));
  c.horizon = std::max(0, goal_step - pre.index) + options.grace_steps;

  const int wrist = hand.floating_base() ? kFloatingBaseDofs : 0;
  c.rho.resize(wrist);
  for (int i = 0; i < wrist; ++i) c.rho[i] = i < 3 ? options.rho_translation : options.rho_rotation;
  c.reward = options.reward;
  if (grasp_frame < 0 || grasp_frame >= plan.joint_trajectory.rows()) {
    throw ConfigError("grasp frame outside the retargeted trajectory");
  }
  c.q_target = plan.joint_trajectory.row(grasp_frame).transpose();
  c.delta_max = options.delta_max;
  c.object_jitter = options.object_jitter;
  return c;
}

}  // namespace dexxfer
