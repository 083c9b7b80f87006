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

#ifndef DEXXFER_HAND_HAND_MODEL_H_
#define DEXXFER_HAND_HAND_MODEL_H_

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dexxfer/common/json_util.h"
#include "dexxfer/geom/pose.h"

namespace dexxfer {

// Number of human fingers (thumb, index, middle, ring, pinky).
inline constexpr int kHumanFingers = 5;
inline constexpr int kFloatingBaseDofs = 6;

enum class JointType { kRevolute, kPrismatic };

// Position-servo parameters of one actuated joint.
struct JointGains {
  double kp = 1.0;
  double kd = 0.1;
  double armature = 1e-3;
};

struct Joint {
  std::string name;
  JointType type = JointType::kRevolute;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  int parent_link = -1;
  int child_link = -1;
  // Child frame relative to the parent link frame at q = 0.
  Pose6 origin;
  double lower = 0.0;
  double upper = 0.0;
  JointGains gains;
};

struct CollisionPrimitive {
  enum class Kind { kSphere, kCapsule };
  Kind kind = Kind::kSphere;
  // Sphere center, or capsule segment endpoints, in the link frame.
  Eigen::Vector3d a = Eigen::Vector3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double radius = 0.0;
};

struct Link {
  std::string name;
  std::vector<CollisionPrimitive> collision;
  // Gravity load only; link inertia is represented by joint armature.
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  int parent_joint = -1;
};

struct Site {
  std::string name;
  int link = -1;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};

// Result of forward kinematics at one joint configuration.
struct HandKinematics {
  std::vector<Eigen::Isometry3d> link_frames;
  std::vector<Eigen::Vector3d> joint_origins;  // world frame
  std::vector<Eigen::Vector3d> joint_axes;     // world frame, unit
  Eigen::MatrixX3d fingertips;                 // K x 3
  std::array<Eigen::Vector3d, 3> palm_sites;   // index MCP, ring MCP, wrist
};

// Kinematic tree of a dexterous hand. Immutable after loading.
class HandModel {
 public:
  static HandModel FromJson(const Json& j, const std::string& source = "");
  static HandModel Load(const std::filesystem::path& path);
  Json ToJson() const;

  const std::string& name() const { return name_; }
  int dof() const { return static_cast<int>(joints_.size()); }
  int num_fingertips() const { return static_cast<int>(fingertips_.size()); }
  bool floating_base() const { return floating_base_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Site>& fingertips() const { return fingertips_; }
  const std::array<Site, 3>& palm_sites() const { return palm_sites_; }
  double palm_normal_sign() const { return palm_normal_sign_; }
  int root_link() const { return root_link_; }

  // Human finger index -> fingertip index; unmapped human fingers are absent.
  const std::map<int, int>& correspondence() const { return correspondence_; }
  // Fingertip index mapped from the human thumb, or -1.
  int thumb_fingertip() const;

  Eigen::VectorXd lower_limits() const;
  Eigen::VectorXd upper_limits() const;
  Eigen::VectorXd MidRange() const;
  Eigen::VectorXd Clamp(const Eigen::VectorXd& q) const;
  // Joint indices on the path from the root to `link`.
  const std::vector<int>& ancestors(int link) const { return ancestors_[link]; }
  int LinkIndex(const std::string& name) const;

  HandKinematics ForwardKinematics(const Eigen::VectorXd& q) const;

  // 3 x D Jacobian of a world point rigidly attached to `link`.
  Eigen::Matrix3Xd PointJacobian(const HandKinematics& kin, int link,
                                 const Eigen::Vector3d& point_world) const;
  // Stacked (3K) x D Jacobian of all fingertip sites.
  Eigen::MatrixXd FingertipJacobian(const HandKinematics& kin) const;

  // Unit palm normal from the three palm sites, signed per the model file.
  // Throws GeometryError when the sites are collinear.
  Eigen::Vector3d PalmOrientation(const HandKinematics& kin) const;
  Eigen::Vector3d PalmOrientation(const Eigen::VectorXd& q) const {
    return PalmOrientation(ForwardKinematics(q));
  }

  // Generalized gravity force on the joints (what gravity does to q).
  Eigen::VectorXd GravityTorques(const HandKinematics& kin,
                                 const Eigen::Vector3d& gravity) const;

  // Wrist pose (frame of the link driven by the 6th floating-base joint).
  Pose6 WristPose(const HandKinematics& kin) const;
  // Floating-base joint values reproducing `wrist`, choosing the Euler branch
  // closest to `hint` (6 values; only entries 3..5 are used).
  Eigen::Matrix<double, 6, 1> WristJointsFromPose(
      const Pose6& wrist, const Eigen::Matrix<double, 6, 1>& hint) const;

 private:
  void Validate(const std::string& source);

  std::string name_;
  std::vector<Joint> joints_;
  std::vector<Link> links_;
  std::vector<Site> fingertips_;
  std::array<Site, 3> palm_sites_;
  std::map<int, int> correspondence_;
  double palm_normal_sign_ = 1.0;
  bool floating_base_ = false;
  int root_link_ = -1;
  std::vector<int> topo_order_;                // joint evaluation order
  std::vector<std::vector<int>> ancestors_;    // per link
};

}  // namespace dexxfer

#endif  // DEXXFER_HAND_HAND_MODEL_H_
