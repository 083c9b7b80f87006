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

#ifndef DEXXFER_SIM_WORLD_H_
#define DEXXFER_SIM_WORLD_H_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/demo/demo.h"
#include "dexxfer/geom/pose.h"
#include "dexxfer/hand/hand_model.h"

namespace dexxfer {

struct SimConfig {
  double dt = 1.0 / 120.0;  // control period
  int substeps = 10;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  double contact_stiffness = 5e3;  // N/m
  double contact_damping = 50.0;   // N s/m, normal direction
  // Viscous slip resistance inside the friction cone, N s/m. Large values
  // approximate sticking contact.
  double tangential_damping = 2e3;
  double friction = 1.0;
  bool ground = true;
  double ground_height = 0.0;
  double max_kinetic_energy = 1e3;  // J; above this the step fails
  // Per-joint PD gains. Empty means "use the hand model's gains".
  std::vector<JointGains> gains;

  Json ToJson() const;
  static SimConfig FromJson(const Json& j);
};

// Free-body state of the object. `pose` is the object frame (the frame its
// geometry is expressed in); velocities are of the COM, in world axes.
struct ObjectState {
  Pose6 pose;
  Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();
};

struct Contact {
  int link = -1;  // hand link, or -1 for the ground
  Eigen::Vector3d point = Eigen::Vector3d::Zero();   // on the object surface
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ(); // out of the object
  double depth = 0.0;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // applied to the object
};

struct WorldState {
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
  ObjectState object;
  int step = 0;
  std::vector<Contact> contacts;  // from the last substep

  bool HandObjectContact() const;
  Json Summary() const;
};

// Dynamic state from a Summary(); the contact list is left empty (stepping
// recomputes it).
WorldState StateFromSummary(const Json& j);

// Distance between one hand link and the object.
struct LinkDistance {
  int link = -1;
  double distance = 0.0;
  Eigen::Vector3d hand_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d object_point = Eigen::Vector3d::Zero();
};

// Simplified rigid-body world: a floating, PD-servoed, quasi-static hand and
// one free object with penalty contacts. Stepping is a pure function of
// (state, control), so copies of a World may run on separate threads.
class World {
 public:
  World(std::shared_ptr<const HandModel> hand, std::shared_ptr<const ObjectGeometry> object,
        SimConfig config);

  const HandModel& hand() const { return *hand_; }
  const ObjectGeometry& object() const { return *object_; }
  const SimConfig& config() const { return config_; }
  const std::vector<JointGains>& gains() const { return gains_; }

  // Same hand and object under another configuration.
  World WithConfig(SimConfig config) const { return World(hand_, object_, std::move(config)); }

  WorldState MakeState(const Eigen::VectorXd& q, const Pose6& object_pose) const;

  // One control period with position targets `control`.
  WorldState Step(const WorldState& state, const Eigen::VectorXd& control) const;

  // Signed distance from each distal phalanx (link carrying a fingertip
  // site) to the object, in fingertip order.
  std::vector<LinkDistance> CollisionQuery(const WorldState& state) const;
  // Same, for every hand link that has collision primitives.
  std::vector<LinkDistance> AllLinkDistances(const WorldState& state) const;

  double KineticEnergy(const WorldState& state) const;

 private:
  void Substep(WorldState& s, const Eigen::VectorXd& control, double h) const;
  LinkDistance LinkToObject(const HandKinematics& kin, const Pose6& object_pose, int link) const;

  std::shared_ptr<const HandModel> hand_;
  std::shared_ptr<const ObjectGeometry> object_;
  SimConfig config_;
  std::vector<JointGains> gains_;
  Eigen::Matrix3d inertia_body_;
};

// Scene file: {"hand": path, "demo": path, "sim": {...}}; paths are relative
// to the scene file.
struct Scene {
  std::shared_ptr<const HandModel> hand;
  std::shared_ptr<const DemoSequence> demo;
  SimConfig sim;
};
Scene LoadScene(const std::filesystem::path& path);

// One JSON object per line.
void WriteTrajectoryDump(std::ostream& out, const std::vector<WorldState>& states);

}  // namespace dexxfer

#endif  // DEXXFER_SIM_WORLD_H_
