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

#include "dexxfer/sim/world.h"

#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "dexxfer/common/errors.h"

namespace dexxfer {
namespace {

Eigen::Matrix3d Skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

struct ContactWork {
  Contact contact;
  Eigen::Matrix<double, 3, 6> g;  // object point velocity = g * [v; w]
  Eigen::Vector3d hand_velocity = Eigen::Vector3d::Zero();
  bool normal_damping = true;
  bool sliding = false;
  Eigen::Vector3d slide_direction = Eigen::Vector3d::Zero();
  double slide_normal_force = 0.0;
};

}  // namespace

Json SimConfig::ToJson() const {
  Json g = Json::array();
  for (const JointGains& jg : gains) g.push_back({{"kp", jg.kp}, {"kd", jg.kd}, {"armature", jg.armature}});
  return Json{{"dt", dt},
              {"substeps", substeps},
              {"gravity", dexxfer::ToJson(gravity)},
              {"contact_stiffness", contact_stiffness},
              {"contact_damping", contact_damping},
              {"tangential_damping", tangential_damping},
              {"friction", friction},
              {"ground", ground},
              {"ground_height", ground_height},
              {"max_kinetic_energy", max_kinetic_energy},
              {"gains", g}};
}

SimConfig SimConfig::FromJson(const Json& j) {
  SimConfig c;
  c.dt = j.value("dt", c.dt);
  c.substeps = j.value("substeps", c.substeps);
  if (j.contains("gravity")) c.gravity = ParseVec3(j.at("gravity"), "sim.gravity");
  c.contact_stiffness = j.value("contact_stiffness", c.contact_stiffness);
  c.contact_damping = j.value("contact_damping", c.contact_damping);
  c.tangential_damping = j.value("tangential_damping", c.tangential_damping);
  c.friction = j.value("friction", c.friction);
  c.ground = j.value("ground", c.ground);
  c.ground_height = j.value("ground_height", c.ground_height);
  c.max_kinetic_energy = j.value("max_kinetic_energy", c.max_kinetic_energy);
  if (j.contains("gains")) {
    for (const Json& g : j.at("gains")) {
      JointGains jg;
      jg.kp = g.value("kp", jg.kp);
      jg.kd = g.value("kd", jg.kd);
      jg.armature = g.value("armature", jg.armature);
      c.gains.push_back(jg);
    }
  }
  if (!(c.dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (c.substeps < 1) throw ConfigError("sim.substeps must be >= 1");
  if (!(c.contact_stiffness > 0.0)) throw ConfigError("sim.contact_stiffness must be positive");
  if (c.friction < 0.0) throw ConfigError("sim.friction must be nonnegative");
  return c;
}

bool WorldState::HandObjectContact() const {
  for (const Contact& c : contacts) {
    if (c.link >= 0) return true;
  }
  return false;
}

Json WorldState::Summary() const {
  Eigen::VectorXd qv = q, qdv = qd;
  int hand_contacts = 0;
  for (const Contact& c : contacts) hand_contacts += c.link >= 0 ? 1 : 0;
  return Json{{"step", step},
              {"q", ToJson(qv)},
              {"qd", ToJson(qdv)},
              {"object", PoseToJson(object.pose)},
              {"linear_velocity", ToJson(object.linear_velocity)},
              {"angular_velocity", ToJson(object.angular_velocity)},
              {"hand_contacts", hand_contacts},
              {"contacts", static_cast<int>(contacts.size())}};
}

WorldState StateFromSummary(const Json& j) {
  WorldState s;
  s.step = RequireField(j, "step", "state").get<int>();
  s.q = ParseVector(RequireField(j, "q", "state"), "state.q");
  s.qd = ParseVector(RequireField(j, "qd", "state"), "state.qd");
  if (s.qd.size() != s.q.size()) throw ParseError("state", "q and qd differ in length");
  s.object.pose = PoseFromJson(RequireField(j, "object", "state"), "state.object");
  s.object.linear_velocity = ParseVec3(RequireField(j, "linear_velocity", "state"), "state.linear_velocity");
  s.object.angular_velocity = ParseVec3(RequireField(j, "angular_velocity", "state"), "state.angular_velocity");
  return s;
}

World::World(std::shared_ptr<const HandModel> hand, std::shared_ptr<const ObjectGeometry> object,
             SimConfig config)
    : hand_(std::move(hand)), object_(std::move(object)), config_(std::move(config)) {
  if (!hand_ || !object_) throw ConfigError("world needs a hand and an object");
  if (object_->pieces.empty()) throw ConfigError("object has no collision pieces");
  if (!(config_.dt > 0.0)) throw ConfigError("sim.dt must be positive");
  if (!(config_.contact_stiffness > 0.0)) throw ConfigError("contact stiffness must be positive");
  if (config_.gains.empty()) {
    for (const Joint& j : hand_->joints()) gains_.push_back(j.gains);
  } else {
    if (static_cast<int>(config_.gains.size()) != hand_->dof()) {
      throw ConfigError("sim gains count does not match hand DoF");
    }
    gains_ = config_.gains;
  }
  for (const JointGains& g : gains_) {
    if (!(g.armature > 0.0) || g.kp < 0.0 || g.kd < 0.0) {
      throw ConfigError("joint gains need armature > 0 and kp, kd >= 0");
    }
  }
  inertia_body_ = object_->Inertia();
}

WorldState World::MakeState(const Eigen::VectorXd& q, const Pose6& object_pose) const {
  if (q.size() != hand_->dof()) throw DimensionError("state q has wrong dimension");
  WorldState s;
  s.q = q;
  s.qd = Eigen::VectorXd::Zero(q.size());
  s.object.pose = object_pose;
  return s;
}

WorldState World::Step(const WorldState& state, const Eigen::VectorXd& control) const {
  if (control.size() != hand_->dof()) {
    throw DimensionError("control has " + std::to_string(control.size()) + " entries, expected " +
                         std::to_string(hand_->dof()));
  }
  if (!control.allFinite()) throw SimulationError(state.step, "non-finite control");
  WorldState s = state;
  const double h = config_.dt / config_.substeps;
  for (int k = 0; k < config_.substeps; ++k) Substep(s, control, h);
  s.step = state.step + 1;
  const double ke = KineticEnergy(s);
  if (!std::isfinite(ke) || ke > config_.max_kinetic_energy || !s.q.allFinite()) {
    throw SimulationError(s.step, "simulation diverged (kinetic energy " + std::to_string(ke) + " J)");
  }
  return s;
}

void World::Substep(WorldState& s, const Eigen::VectorXd& control, double h) const {
  const HandModel& hand = *hand_;
  const HandKinematics kin = hand.ForwardKinematics(s.q);
  ObjectState& obj = s.object;
  const Eigen::Matrix3d rot = obj.pose.orientation.matrix();
  const Eigen::Vector3d com = obj.pose.TransformPoint(object_->com);
  const Pose6 to_object = obj.pose.Inverse();
  const double k = config_.contact_stiffness;

  std::vector<ContactWork> work;
  auto add_contact = [&](int link, const Eigen::Vector3d& point, const Eigen::Vector3d& normal,
                         double depth, const Eigen::Vector3d& hand_velocity) {
    ContactWork w;
    w.contact.link = link;
    w.contact.point = point;
    w.contact.normal = normal;
    w.contact.depth = depth;
    const Eigen::Vector3d r = point - com;
    w.g.leftCols<3>().setIdentity();
    w.g.rightCols<3>() = -Skew(r);
    w.hand_velocity = hand_velocity;
    work.push_back(w);
  };

  for (int l = 0; l < static_cast<int>(hand.links().size()); ++l) {
    const Link& link = hand.links()[l];
    for (const CollisionPrimitive& prim : link.collision) {
      const Eigen::Vector3d a = kin.link_frames[l] * prim.a;
      const Eigen::Vector3d b = kin.link_frames[l] * prim.b;
      const double half = 0.5 * (a - b).norm();
      for (const ConvexPiece& piece : object_->pieces) {
        const Eigen::Vector3d pc = obj.pose.TransformPoint(piece.center());
        if ((0.5 * (a + b) - pc).norm() - half - prim.radius > piece.bounding_radius()) continue;
        const Eigen::Vector3d ao = to_object.TransformPoint(a);
        double sd;
        Eigen::Vector3d surface, normal;
        if (prim.kind == CollisionPrimitive::Kind::kSphere) {
          const SurfaceQuery q = piece.Query(ao);
          sd = q.signed_distance;
          surface = q.surface_point;
          normal = q.normal;
        } else {
          const SegmentQuery q = piece.QuerySegment(ao, to_object.TransformPoint(b));
          sd = q.signed_distance;
          surface = q.surface_point;
          normal = q.normal;
        }
        sd -= prim.radius;
        if (sd >= 0.0) continue;
        const Eigen::Vector3d point = obj.pose.TransformPoint(surface);
        const Eigen::Vector3d hand_velocity = hand.PointJacobian(kin, l, point) * s.qd;
        add_contact(l, point, rot * normal, -sd, hand_velocity);
      }
    }
  }
  if (config_.ground) {
    for (const ConvexPiece& piece : object_->pieces) {
      for (const Eigen::Vector3d& v : piece.vertices()) {
        const Eigen::Vector3d p = obj.pose.TransformPoint(v);
        if (p.z() < config_.ground_height) {
          add_contact(-1, p, -Eigen::Vector3d::UnitZ(), config_.ground_height - p.z(),
                      Eigen::Vector3d::Zero());
        }
      }
    }
  }

  // Object velocity update, implicit in the contact damping.
  const double mass = object_->mass;
  const Eigen::Matrix3d inertia = rot * inertia_body_ * rot.transpose();
  Eigen::Matrix<double, 6, 6> m6 = Eigen::Matrix<double, 6, 6>::Zero();
  m6.topLeftCorner<3, 3>() = mass * Eigen::Matrix3d::Identity();
  m6.bottomRightCorner<3, 3>() = inertia;
  Eigen::Matrix<double, 6, 1> vel;
  vel << obj.linear_velocity, obj.angular_velocity;
  Eigen::Matrix<double, 6, 1> ext = Eigen::Matrix<double, 6, 1>::Zero();
  ext.head<3>() = mass * config_.gravity;

  auto damping_matrix = [&](const ContactWork& w) {
    const Eigen::Vector3d& n = w.contact.normal;
    const Eigen::Matrix3d nn = n * n.transpose();
    Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
    if (w.normal_damping) c += config_.contact_damping * nn;
    if (!w.sliding) c += config_.tangential_damping * (Eigen::Matrix3d::Identity() - nn);
    return c;
  };
  auto contact_force = [&](const ContactWork& w, const Eigen::Matrix<double, 6, 1>& v1) {
    const Eigen::Vector3d& n = w.contact.normal;
    Eigen::Vector3d f = -k * w.contact.depth * n - damping_matrix(w) * (w.g * v1 - w.hand_velocity);
    if (w.sliding) f += config_.friction * w.slide_normal_force * w.slide_direction;
    return f;
  };

  Eigen::Matrix<double, 6, 1> v1 = vel;
  for (int iter = 0; iter < 4; ++iter) {
    Eigen::Matrix<double, 6, 6> a = m6 / h;
    Eigen::Matrix<double, 6, 1> rhs = m6 * vel / h + ext;
    for (const ContactWork& w : work) {
      const Eigen::Matrix3d c = damping_matrix(w);
      a += w.g.transpose() * c * w.g;
      Eigen::Vector3d f0 = -k * w.contact.depth * w.contact.normal + c * w.hand_velocity;
      if (w.sliding) f0 += config_.friction * w.slide_normal_force * w.slide_direction;
      rhs += w.g.transpose() * f0;
    }
    v1 = a.ldlt().solve(rhs);
    bool changed = false;
    for (ContactWork& w : work) {
      const Eigen::Vector3d f = contact_force(w, v1);
      const double fn = -f.dot(w.contact.normal);
      if (fn < 0.0 && w.normal_damping) {
        w.normal_damping = false;
        changed = true;
        continue;
      }
      const Eigen::Vector3d ft = f + fn * w.contact.normal;
      const double limit = config_.friction * std::max(fn, 0.0);
      if (!w.sliding && ft.norm() > limit * (1.0 + 1e-9) + 1e-12) {
        w.sliding = true;
        w.slide_normal_force = std::max(fn, 0.0);
        w.slide_direction = ft.norm() > 0.0 ? Eigen::Vector3d(ft / ft.norm()) : Eigen::Vector3d::Zero();
        changed = true;
      }
    }
    if (!changed) break;
  }

  Eigen::VectorXd tau = Eigen::VectorXd::Zero(hand.dof());
  s.contacts.clear();
  for (ContactWork& w : work) {
    Eigen::Vector3d f = contact_force(w, v1);
    if (-f.dot(w.contact.normal) < 0.0) f.setZero();
    w.contact.force = f;
    if (w.contact.link >= 0) {
      tau -= hand.PointJacobian(kin, w.contact.link, w.contact.point).transpose() * f;
    }
    s.contacts.push_back(w.contact);
  }

  obj.linear_velocity = v1.head<3>();
  obj.angular_velocity = v1.tail<3>();
  const Eigen::Vector3d new_com = com + h * obj.linear_velocity;
  obj.pose.orientation = Rotation3::FromRotationVector(h * obj.angular_velocity) * obj.pose.orientation;
  obj.pose.position = new_com - obj.pose.orientation.Rotate(object_->com);

  // Hand joints: implicit PD, explicit contact and gravity loads.
  tau += hand.GravityTorques(kin, config_.gravity);
  for (int j = 0; j < hand.dof(); ++j) {
    const JointGains& g = gains_[j];
    const double inv = g.armature / h;
    const double v = (inv * s.qd[j] + g.kp * (control[j] - s.q[j]) + tau[j]) / (inv + g.kd + h * g.kp);
    double q = s.q[j] + h * v;
    double qd = v;
    const Joint& jt = hand.joints()[j];
    if (q < jt.lower) {
      q = jt.lower;
      qd = 0.0;
    } else if (q > jt.upper) {
      q = jt.upper;
      qd = 0.0;
    }
    s.q[j] = q;
    s.qd[j] = qd;
  }
}

LinkDistance World::LinkToObject(const HandKinematics& kin, const Pose6& object_pose, int link) const {
  LinkDistance out;
  out.link = link;
  out.distance = std::numeric_limits<double>::infinity();
  const Pose6 to_object = object_pose.Inverse();
  for (const CollisionPrimitive& prim : hand_->links()[link].collision) {
    const Eigen::Vector3d a = to_object.TransformPoint(kin.link_frames[link] * prim.a);
    const Eigen::Vector3d b = to_object.TransformPoint(kin.link_frames[link] * prim.b);
    for (const ConvexPiece& piece : object_->pieces) {
      Eigen::Vector3d core, surface, normal;
      double sd;
      if (prim.kind == CollisionPrimitive::Kind::kSphere) {
        const SurfaceQuery q = piece.Query(a);
        core = a;
        surface = q.surface_point;
        normal = q.normal;
        sd = q.signed_distance;
      } else {
        const SegmentQuery q = piece.QuerySegment(a, b);
        core = q.segment_point;
        surface = q.surface_point;
        normal = q.normal;
        sd = q.signed_distance;
      }
      sd -= prim.radius;
      if (sd < out.distance) {
        out.distance = sd;
        out.object_point = object_pose.TransformPoint(surface);
        out.hand_point = object_pose.TransformPoint(core - prim.radius * normal);
      }
    }
  }
  return out;
}

std::vector<LinkDistance> World::CollisionQuery(const WorldState& state) const {
  const HandKinematics kin = hand_->ForwardKinematics(state.q);
  std::vector<LinkDistance> out;
  for (const Site& tip : hand_->fingertips()) out.push_back(LinkToObject(kin, state.object.pose, tip.link));
  return out;
}

std::vector<LinkDistance> World::AllLinkDistances(const WorldState& state) const {
  const HandKinematics kin = hand_->ForwardKinematics(state.q);
  std::vector<LinkDistance> out;
  for (int l = 0; l < static_cast<int>(hand_->links().size()); ++l) {
    if (!hand_->links()[l].collision.empty()) out.push_back(LinkToObject(kin, state.object.pose, l));
  }
  return out;
}

double World::KineticEnergy(const WorldState& state) const {
  const Eigen::Matrix3d rot = state.object.pose.orientation.matrix();
  const Eigen::Vector3d& w = state.object.angular_velocity;
  double ke = 0.5 * object_->mass * state.object.linear_velocity.squaredNorm() +
              0.5 * w.dot(rot * inertia_body_ * rot.transpose() * w);
  for (int j = 0; j < hand_->dof(); ++j) ke += 0.5 * gains_[j].armature * state.qd[j] * state.qd[j];
  return ke;
}

Scene LoadScene(const std::filesystem::path& path) {
  const Json j = ReadJsonFile(path);
  const std::filesystem::path base = path.parent_path();
  Scene scene;
  scene.hand = std::make_shared<HandModel>(
      HandModel::Load(base / RequireField(j, "hand", path.string()).get<std::string>()));
  scene.demo = std::make_shared<DemoSequence>(
      LoadDemo(base / RequireField(j, "demo", path.string()).get<std::string>()));
  scene.sim = SimConfig::FromJson(j.value("sim", Json::object()));
  return scene;
}

void WriteTrajectoryDump(std::ostream& out, const std::vector<WorldState>& states) {
  for (const WorldState& s : states) out << s.Summary().dump() << "\n";
}

}  // namespace dexxfer
