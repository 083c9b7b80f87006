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

#include "dexxfer/hand/hand_model.h"

#include <cmath>
#include <deque>
#include <numbers>
#include <set>

#include "dexxfer/common/errors.h"

namespace dexxfer {
namespace {

Pose6 ParseOrigin(const Json& j, const std::string& where) {
  Pose6 p;
  if (j.contains("pos")) p.position = ParseVec3(j.at("pos"), where + ".pos");
  if (j.contains("quat")) {
    Eigen::VectorXd q = ParseVector(j.at("quat"), where + ".quat");
    if (q.size() != 4 || q.norm() < 1e-12) {
      throw ParseError(where, "bad quaternion");
    }
    p.orientation = Rotation3::FromWxyz(q[0], q[1], q[2], q[3]);
  } else if (j.contains("rpy")) {
    // Fixed-axis roll/pitch/yaw as in URDF: R = Rz(yaw) Ry(pitch) Rx(roll).
    Eigen::Vector3d rpy = ParseVec3(j.at("rpy"), where + ".rpy");
    Eigen::Matrix3d r = (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
                         Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
                         Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
                            .toRotationMatrix();
    p.orientation = Rotation3::FromMatrix(r);
  }
  return p;
}

Site ParseSite(const Json& j, const std::map<std::string, int>& link_ids,
               const std::string& where) {
  Site s;
  s.name = RequireField(j, "name", where).get<std::string>();
  const std::string link = RequireField(j, "link", where + " " + s.name).get<std::string>();
  auto it = link_ids.find(link);
  if (it == link_ids.end()) {
    throw ParseError(where + " " + s.name, "unknown link '" + link + "'");
  }
  s.link = it->second;
  if (j.contains("pos")) s.offset = ParseVec3(j.at("pos"), where + " " + s.name);
  return s;
}

double WrapToNear(double angle, double hint) {
  const double two_pi = 2.0 * std::numbers::pi;
  return angle + two_pi * std::round((hint - angle) / two_pi);
}

}  // namespace

HandModel HandModel::FromJson(const Json& j, const std::string& source) {
  HandModel m;
  const std::string src = source.empty() ? "hand" : source;
  m.name_ = j.value("name", std::string("hand"));
  m.floating_base_ = j.value("floating_base", false);
  m.palm_normal_sign_ = j.value("palm_normal_sign", 1.0) >= 0.0 ? 1.0 : -1.0;

  std::map<std::string, int> link_ids;
  for (const Json& lj : RequireField(j, "links", src)) {
    Link link;
    link.name = RequireField(lj, "name", src + " link").get<std::string>();
    const std::string where = "link " + link.name;
    if (link_ids.count(link.name)) throw ParseError(where, "duplicate link name");
    link.mass = lj.value("mass", 0.0);
    if (lj.contains("com")) link.com = ParseVec3(lj.at("com"), where + ".com");
    if (lj.contains("collision")) {
      for (const Json& cj : lj.at("collision")) {
        CollisionPrimitive prim;
        const std::string type = RequireField(cj, "type", where).get<std::string>();
        prim.radius = RequireFiniteNumber(RequireField(cj, "radius", where), where);
        if (prim.radius <= 0.0) throw ParseError(where, "primitive radius must be > 0");
        if (type == "sphere") {
          prim.kind = CollisionPrimitive::Kind::kSphere;
          if (cj.contains("center")) prim.a = ParseVec3(cj.at("center"), where);
          prim.b = prim.a;
        } else if (type == "capsule") {
          prim.kind = CollisionPrimitive::Kind::kCapsule;
          prim.a = ParseVec3(RequireField(cj, "from", where), where);
          prim.b = ParseVec3(RequireField(cj, "to", where), where);
        } else {
          throw ParseError(where, "unknown primitive type '" + type + "'");
        }
        link.collision.push_back(prim);
      }
    }
    link_ids[link.name] = static_cast<int>(m.links_.size());
    m.links_.push_back(std::move(link));
  }

  for (const Json& jj : RequireField(j, "joints", src)) {
    Joint joint;
    joint.name = RequireField(jj, "name", src + " joint").get<std::string>();
    const std::string where = "joint " + joint.name;
    const std::string type = RequireField(jj, "type", where).get<std::string>();
    if (type == "revolute") {
      joint.type = JointType::kRevolute;
    } else if (type == "prismatic") {
      joint.type = JointType::kPrismatic;
    } else {
      throw ParseError(where, "unknown joint type '" + type + "'");
    }
    const std::string parent = RequireField(jj, "parent", where).get<std::string>();
    const std::string child = RequireField(jj, "child", where).get<std::string>();
    if (!link_ids.count(parent)) throw ParseError(where, "unknown parent link '" + parent + "'");
    if (!link_ids.count(child)) throw ParseError(where, "unknown child link '" + child + "'");
    joint.parent_link = link_ids[parent];
    joint.child_link = link_ids[child];
    if (joint.parent_link == joint.child_link) throw ParseError(where, "joint links a link to itself");
    joint.axis = ParseVec3(RequireField(jj, "axis", where), where + ".axis");
    if (joint.axis.norm() < 1e-12) throw ParseError(where, "zero axis");
    joint.axis.normalize();
    if (jj.contains("origin")) joint.origin = ParseOrigin(jj.at("origin"), where + ".origin");
    Eigen::VectorXd lim = ParseVector(RequireField(jj, "limits", where), where + ".limits");
    if (lim.size() != 2 || !(lim[0] <= lim[1])) throw ParseError(where, "limits must be [lower, upper]");
    joint.lower = lim[0];
    joint.upper = lim[1];
    if (jj.contains("gains")) {
      const Json& g = jj.at("gains");
      joint.gains.kp = g.value("kp", joint.gains.kp);
      joint.gains.kd = g.value("kd", joint.gains.kd);
      joint.gains.armature = g.value("armature", joint.gains.armature);
    }
    Link& child_link = m.links_[joint.child_link];
    if (child_link.parent_joint >= 0) {
      throw ParseError(where, "link '" + child + "' already has a parent joint");
    }
    child_link.parent_joint = static_cast<int>(m.joints_.size());
    m.joints_.push_back(std::move(joint));
  }

  for (const Json& sj : RequireField(j, "fingertip_sites", src)) {
    m.fingertips_.push_back(ParseSite(sj, link_ids, "fingertip site"));
  }
  const Json& palm = RequireField(j, "palm_sites", src);
  if (!palm.is_array() || palm.size() != 3) {
    throw ParseError("palm_sites", "expected exactly three sites (index MCP, ring MCP, wrist)");
  }
  for (int i = 0; i < 3; ++i) m.palm_sites_[i] = ParseSite(palm[i], link_ids, "palm site");

  std::map<std::string, int> tip_ids;
  for (int i = 0; i < m.num_fingertips(); ++i) {
    if (tip_ids.count(m.fingertips_[i].name)) {
      throw ParseError("fingertip site " + m.fingertips_[i].name, "duplicate name");
    }
    tip_ids[m.fingertips_[i].name] = i;
  }
  for (const auto& [key, value] : RequireField(j, "correspondence", src).items()) {
    int finger = -1;
    try {
      finger = std::stoi(key);
    } catch (const std::exception&) {
      throw ParseError("correspondence", "bad human finger index '" + key + "'");
    }
    if (finger < 0 || finger >= kHumanFingers) {
      throw ParseError("correspondence", "human finger index out of range: " + key);
    }
    const std::string site = value.get<std::string>();
    if (!tip_ids.count(site)) throw ParseError("correspondence", "unknown fingertip site '" + site + "'");
    m.correspondence_[finger] = tip_ids[site];
  }
  m.Validate(src);
  return m;
}

void HandModel::Validate(const std::string& source) {
  const int n_links = static_cast<int>(links_.size());
  // Cycle check: walking parents from any link must reach a root.
  for (int l = 0; l < n_links; ++l) {
    int cur = l;
    int steps = 0;
    while (links_[cur].parent_joint >= 0) {
      const Joint& jt = joints_[links_[cur].parent_joint];
      cur = jt.parent_link;
      if (++steps > n_links) throw ParseError("joint " + jt.name, "kinematic tree contains a cycle");
    }
  }
  root_link_ = -1;
  for (int l = 0; l < n_links; ++l) {
    if (links_[l].parent_joint >= 0) continue;
    if (root_link_ >= 0) {
      throw ParseError("link " + links_[l].name, "second root link (tree must have a single root)");
    }
    root_link_ = l;
  }
  if (root_link_ < 0) throw ParseError(source, "no root link");

  // Breadth-first joint order from the root.
  std::vector<std::vector<int>> children(n_links);
  for (int i = 0; i < dof(); ++i) children[joints_[i].parent_link].push_back(i);
  ancestors_.assign(n_links, {});
  topo_order_.clear();
  std::deque<int> queue{root_link_};
  while (!queue.empty()) {
    const int l = queue.front();
    queue.pop_front();
    for (int ji : children[l]) {
      topo_order_.push_back(ji);
      const int c = joints_[ji].child_link;
      ancestors_[c] = ancestors_[l];
      ancestors_[c].push_back(ji);
      queue.push_back(c);
    }
  }
  if (static_cast<int>(topo_order_.size()) != dof()) {
    throw ParseError(source, "joints unreachable from the root");
  }

  if (num_fingertips() == 0 || num_fingertips() > kHumanFingers) {
    throw ParseError("fingertip_sites", "expected 1..5 fingertip sites");
  }
  std::set<int> used;
  for (const auto& [finger, tip] : correspondence_) {
    if (!used.insert(tip).second) {
      throw ParseError("correspondence", "fingertip '" + fingertips_[tip].name + "' mapped twice");
    }
  }

  if (floating_base_) {
    if (dof() < kFloatingBaseDofs) throw ParseError(source, "floating base needs 6 leading joints");
    int link = root_link_;
    for (int i = 0; i < kFloatingBaseDofs; ++i) {
      const Joint& jt = joints_[i];
      const bool prismatic = i < 3;
      const Eigen::Vector3d want = Eigen::Vector3d::Unit(i % 3);
      if ((jt.type == JointType::kPrismatic) != prismatic || (jt.axis - want).norm() > 1e-12 ||
          jt.parent_link != link || jt.origin.position.norm() > 0.0 ||
          jt.origin.orientation.Angle() > 0.0) {
        throw ParseError("joint " + jt.name,
                         "floating base must be x,y,z prismatic then x,y,z revolute joints "
                         "chained from the root with identity origins");
      }
      link = jt.child_link;
    }
  }
}

HandModel HandModel::Load(const std::filesystem::path& path) {
  return FromJson(ReadJsonFile(path), path.string());
}

Json HandModel::ToJson() const {
  Json j;
  j["name"] = name_;
  j["floating_base"] = floating_base_;
  j["palm_normal_sign"] = palm_normal_sign_;
  Json links = Json::array();
  for (const Link& l : links_) {
    Json lj{{"name", l.name}, {"mass", l.mass}, {"com", dexxfer::ToJson(l.com)}};
    Json coll = Json::array();
    for (const CollisionPrimitive& p : l.collision) {
      if (p.kind == CollisionPrimitive::Kind::kSphere) {
        coll.push_back({{"type", "sphere"}, {"center", dexxfer::ToJson(p.a)}, {"radius", p.radius}});
      } else {
        coll.push_back({{"type", "capsule"}, {"from", dexxfer::ToJson(p.a)},
                        {"to", dexxfer::ToJson(p.b)}, {"radius", p.radius}});
      }
    }
    lj["collision"] = coll;
    links.push_back(lj);
  }
  j["links"] = links;
  Json joints = Json::array();
  for (const Joint& jt : joints_) {
    joints.push_back({{"name", jt.name},
                      {"type", jt.type == JointType::kRevolute ? "revolute" : "prismatic"},
                      {"parent", links_[jt.parent_link].name},
                      {"child", links_[jt.child_link].name},
                      {"axis", dexxfer::ToJson(jt.axis)},
                      {"origin", PoseToJson(jt.origin)},
                      {"limits", {jt.lower, jt.upper}},
                      {"gains", {{"kp", jt.gains.kp}, {"kd", jt.gains.kd}, {"armature", jt.gains.armature}}}});
  }
  j["joints"] = joints;
  auto site_json = [&](const Site& s) {
    return Json{{"name", s.name}, {"link", links_[s.link].name}, {"pos", dexxfer::ToJson(s.offset)}};
  };
  Json tips = Json::array();
  for (const Site& s : fingertips_) tips.push_back(site_json(s));
  j["fingertip_sites"] = tips;
  Json palm = Json::array();
  for (const Site& s : palm_sites_) palm.push_back(site_json(s));
  j["palm_sites"] = palm;
  Json corr = Json::object();
  for (const auto& [finger, tip] : correspondence_) corr[std::to_string(finger)] = fingertips_[tip].name;
  j["correspondence"] = corr;
  return j;
}

int HandModel::thumb_fingertip() const {
  auto it = correspondence_.find(0);
  return it == correspondence_.end() ? -1 : it->second;
}

Eigen::VectorXd HandModel::lower_limits() const {
  Eigen::VectorXd v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].lower;
  return v;
}

Eigen::VectorXd HandModel::upper_limits() const {
  Eigen::VectorXd v(dof());
  for (int i = 0; i < dof(); ++i) v[i] = joints_[i].upper;
  return v;
}

Eigen::VectorXd HandModel::MidRange() const {
  return 0.5 * (lower_limits() + upper_limits());
}

Eigen::VectorXd HandModel::Clamp(const Eigen::VectorXd& q) const {
  return q.cwiseMax(lower_limits()).cwiseMin(upper_limits());
}

int HandModel::LinkIndex(const std::string& name) const {
  for (size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

HandKinematics HandModel::ForwardKinematics(const Eigen::VectorXd& q) const {
  if (q.size() != dof()) {
    throw DimensionError("joint vector has " + std::to_string(q.size()) +
                         " entries, hand '" + name_ + "' has " + std::to_string(dof()));
  }
  HandKinematics kin;
  kin.link_frames.assign(links_.size(), Eigen::Isometry3d::Identity());
  kin.joint_origins.assign(joints_.size(), Eigen::Vector3d::Zero());
  kin.joint_axes.assign(joints_.size(), Eigen::Vector3d::UnitZ());
  for (int ji : topo_order_) {
    const Joint& jt = joints_[ji];
    const Eigen::Isometry3d at_joint = kin.link_frames[jt.parent_link] * jt.origin.ToIsometry();
    kin.joint_origins[ji] = at_joint.translation();
    kin.joint_axes[ji] = at_joint.linear() * jt.axis;
    Eigen::Isometry3d motion = Eigen::Isometry3d::Identity();
    if (jt.type == JointType::kRevolute) {
      motion.linear() = Eigen::AngleAxisd(q[ji], jt.axis).toRotationMatrix();
    } else {
      motion.translation() = jt.axis * q[ji];
    }
    kin.link_frames[jt.child_link] = at_joint * motion;
  }
  kin.fingertips.resize(num_fingertips(), 3);
  for (int k = 0; k < num_fingertips(); ++k) {
    const Site& s = fingertips_[k];
    kin.fingertips.row(k) = (kin.link_frames[s.link] * s.offset).transpose();
  }
  for (int i = 0; i < 3; ++i) {
    const Site& s = palm_sites_[i];
    kin.palm_sites[i] = kin.link_frames[s.link] * s.offset;
  }
  return kin;
}

Eigen::Matrix3Xd HandModel::PointJacobian(const HandKinematics& kin, int link,
                                          const Eigen::Vector3d& point_world) const {
  Eigen::Matrix3Xd jac = Eigen::Matrix3Xd::Zero(3, dof());
  for (int ji : ancestors_[link]) {
    if (joints_[ji].type == JointType::kRevolute) {
      jac.col(ji) = kin.joint_axes[ji].cross(point_world - kin.joint_origins[ji]);
    } else {
      jac.col(ji) = kin.joint_axes[ji];
    }
  }
  return jac;
}

Eigen::MatrixXd HandModel::FingertipJacobian(const HandKinematics& kin) const {
  Eigen::MatrixXd jac(3 * num_fingertips(), dof());
  for (int k = 0; k < num_fingertips(); ++k) {
    jac.middleRows(3 * k, 3) =
        PointJacobian(kin, fingertips_[k].link, kin.fingertips.row(k).transpose());
  }
  return jac;
}

Eigen::Vector3d HandModel::PalmOrientation(const HandKinematics& kin) const {
  const Eigen::Vector3d& index = kin.palm_sites[0];
  const Eigen::Vector3d& ring = kin.palm_sites[1];
  const Eigen::Vector3d& wrist = kin.palm_sites[2];
  const Eigen::Vector3d e1 = ring - index;
  const Eigen::Vector3d e2 = wrist - index;
  const Eigen::Vector3d n = e1.cross(e2);
  const double scale = e1.norm() * e2.norm();
  if (scale == 0.0 || n.norm() <= 1e-9 * scale) {
    throw GeometryError("palm sites are collinear; palm plane is degenerate");
  }
  return palm_normal_sign_ * n.normalized();
}

Eigen::VectorXd HandModel::GravityTorques(const HandKinematics& kin,
                                          const Eigen::Vector3d& gravity) const {
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(dof());
  for (size_t l = 0; l < links_.size(); ++l) {
    if (links_[l].mass <= 0.0) continue;
    const Eigen::Vector3d com = kin.link_frames[l] * links_[l].com;
    tau += PointJacobian(kin, static_cast<int>(l), com).transpose() * (links_[l].mass * gravity);
  }
  return tau;
}

Pose6 HandModel::WristPose(const HandKinematics& kin) const {
  const int link = floating_base_ ? joints_[kFloatingBaseDofs - 1].child_link : root_link_;
  return Pose6::FromIsometry(kin.link_frames[link]);
}

Eigen::Matrix<double, 6, 1> HandModel::WristJointsFromPose(
    const Pose6& wrist, const Eigen::Matrix<double, 6, 1>& hint) const {
  Eigen::Matrix<double, 6, 1> out;
  out.head<3>() = wrist.position;
  // R = Rx(a) Ry(b) Rz(c).
  const Eigen::Vector3d e = wrist.orientation.matrix().eulerAngles(0, 1, 2);
  const Eigen::Vector3d alt(e.x() + std::numbers::pi, std::numbers::pi - e.y(),
                            e.z() + std::numbers::pi);
  Eigen::Vector3d best = e;
  double best_cost = 1e300;
  for (const Eigen::Vector3d& cand : {e, alt}) {
    Eigen::Vector3d wrapped;
    for (int i = 0; i < 3; ++i) wrapped[i] = WrapToNear(cand[i], hint[3 + i]);
    const double cost = (wrapped - hint.tail<3>()).squaredNorm();
    if (cost < best_cost) {
      best_cost = cost;
      best = wrapped;
    }
  }
  out.tail<3>() = best;
  return out;
}

}  // namespace dexxfer
