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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dexxfer/common/errors.h"
#include "dexxfer/hand/hand_model.h"
#include "test_util.h"

namespace dexxfer {
namespace {

using testing::DataPath;

Eigen::VectorXd RandomQ(const HandModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd q(m.dof());
  for (int i = 0; i < m.dof(); ++i) {
    const Joint& j = m.joints()[i];
    q[i] = j.lower + u(rng) * (j.upper - j.lower);
  }
  return q;
}

// Independent chain multiplication of 4x4 homogeneous matrices.
Eigen::Matrix4d LinkOracle(const HandModel& m, const Eigen::VectorXd& q, int link) {
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  for (int ji : m.ancestors(link)) {
    const Joint& j = m.joints()[ji];
    Eigen::Matrix4d motion = Eigen::Matrix4d::Identity();
    if (j.type == JointType::kRevolute) {
      motion.topLeftCorner<3, 3>() = Eigen::AngleAxisd(q[ji], j.axis).toRotationMatrix();
    } else {
      motion.topRightCorner<3, 1>() = j.axis * q[ji];
    }
    t = t * j.origin.Matrix() * motion;
  }
  return t;
}

Eigen::Vector3d SiteOracle(const HandModel& m, const Eigen::VectorXd& q, const Site& s) {
  return (LinkOracle(m, q, s.link) * s.offset.homogeneous()).head<3>();
}

TEST(HandModel, LoadsBundledHands) {
  EXPECT_EQ(HandModel::Load(DataPath("hands/adroit24.json")).dof(), 24);
  EXPECT_EQ(HandModel::Load(DataPath("hands/allegro16.json")).dof(), 16);
  EXPECT_EQ(HandModel::Load(DataPath("hands/leap16.json")).dof(), 16);
  const HandModel toy = HandModel::Load(DataPath("hands/toy3.json"));
  EXPECT_EQ(toy.num_fingertips(), 3);
  EXPECT_TRUE(toy.floating_base());
  EXPECT_EQ(toy.thumb_fingertip(), 0);
}

TEST(HandModel, CyclicTreeNamesJoint) {
  Json j = testing::PlanarFingerJson();
  j["joints"].push_back(Json::parse(
      R"({"name": "loop", "type": "revolute", "parent": "l2", "child": "base", "axis": [0,0,1], "limits": [-1,1]})"));
  try {
    HandModel::FromJson(j);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("joint"), std::string::npos);
  }
}

TEST(HandModel, MalformedInputsNameTheElement) {
  Json j = testing::PlanarFingerJson();
  j["joints"][1]["parent"] = "nope";
  try {
    HandModel::FromJson(j);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.where(), "joint j2");
  }
  Json dup = testing::PlanarFingerJson();
  dup["correspondence"]["2"] = "tip";
  EXPECT_THROW(HandModel::FromJson(dup), ParseError);
}

TEST(HandModel, JsonRoundTrip) {
  const HandModel m = HandModel::Load(DataPath("hands/allegro16.json"));
  const HandModel r = HandModel::FromJson(m.ToJson());
  std::mt19937_64 rng(1);
  const Eigen::VectorXd q = RandomQ(m, rng);
  EXPECT_LT((m.ForwardKinematics(q).fingertips - r.ForwardKinematics(q).fingertips).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ForwardKinematics, PlanarFinger) {
  const HandModel m = testing::PlanarFinger();
  const auto straight = m.ForwardKinematics(Eigen::Vector2d(0, 0));
  EXPECT_LT((straight.fingertips.row(0).transpose() - Eigen::Vector3d(0.07, 0, 0)).norm(), 1e-12);
  const auto up = m.ForwardKinematics(Eigen::Vector2d(std::numbers::pi / 2, 0));
  EXPECT_LT((up.fingertips.row(0).transpose() - Eigen::Vector3d(0, 0.07, 0)).norm(), 1e-12);
}

TEST(ForwardKinematics, DimensionMismatchThrows) {
  const HandModel m = testing::PlanarFinger();
  EXPECT_THROW(m.ForwardKinematics(Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST(ForwardKinematics, MatchesChainOracleOnBundledHands) {
  std::mt19937_64 rng(2);
  for (const auto& name : testing::BundledHands()) {
    const HandModel m = HandModel::Load(DataPath("hands/" + name + ".json"));
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd q = RandomQ(m, rng);
      const HandKinematics kin = m.ForwardKinematics(q);
      for (int k = 0; k < m.num_fingertips(); ++k) {
        EXPECT_LT((kin.fingertips.row(k).transpose() - SiteOracle(m, q, m.fingertips()[k])).norm(), 1e-9) << name;
      }
      for (int s = 0; s < 3; ++s) {
        EXPECT_LT((kin.palm_sites[s] - SiteOracle(m, q, m.palm_sites()[s])).norm(), 1e-9) << name;
      }
    }
  }
}

TEST(ForwardKinematics, RevolutePeriodicity) {
  const HandModel m = HandModel::Load(DataPath("hands/leap16.json"));
  std::mt19937_64 rng(3);
  const Eigen::VectorXd q = RandomQ(m, rng);
  const auto base = m.ForwardKinematics(q).fingertips;
  for (int i = 0; i < m.dof(); ++i) {
    if (m.joints()[i].type != JointType::kRevolute) continue;
    Eigen::VectorXd q2 = q;
    q2[i] += 2.0 * std::numbers::pi;
    EXPECT_LT((m.ForwardKinematics(q2).fingertips - base).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ForwardKinematics, JacobianMatchesFiniteDifferences) {
  const HandModel m = HandModel::Load(DataPath("hands/toy3.json"));
  std::mt19937_64 rng(4);
  const Eigen::VectorXd q = RandomQ(m, rng);
  const Eigen::MatrixXd jac = m.FingertipJacobian(m.ForwardKinematics(q));
  const double h = 1e-6;
  for (int i = 0; i < m.dof(); ++i) {
    Eigen::VectorXd qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    const Eigen::MatrixXd fp = m.ForwardKinematics(qp).fingertips, fm = m.ForwardKinematics(qm).fingertips;
    for (int k = 0; k < m.num_fingertips(); ++k) {
      const Eigen::Vector3d fd = (fp.row(k) - fm.row(k)).transpose() / (2 * h);
      EXPECT_LT((jac.block<3, 1>(3 * k, i) - fd).norm(), 1e-7);
    }
  }
}

Json TiltedPalmJson() {
  return Json::parse(R"({
    "links": [{"name": "base"}, {"name": "palm"}],
    "joints": [{"name": "rx", "type": "revolute", "parent": "base", "child": "palm", "axis": [1,0,0],
                "limits": [-3.2, 3.2]}],
    "fingertip_sites": [{"name": "tip", "link": "palm", "pos": [0.1,0,0]}],
    "palm_sites": [{"name": "i", "link": "palm", "pos": [0,0,0]},
                   {"name": "r", "link": "palm", "pos": [0.08,0.02,0]},
                   {"name": "w", "link": "palm", "pos": [0.08,-0.02,0]}],
    "correspondence": {"1": "tip"}
  })");
}

TEST(PalmOrientation, FlatAndRotated) {
  const HandModel m = HandModel::FromJson(TiltedPalmJson());
  const Eigen::Vector3d flat = m.PalmOrientation(Eigen::VectorXd::Zero(1));
  EXPECT_NEAR(std::abs(flat.z()), 1.0, 1e-12);
  const Eigen::Vector3d rot = m.PalmOrientation(Eigen::VectorXd::Constant(1, std::numbers::pi / 2));
  EXPECT_NEAR(std::abs(rot.y()), 1.0, 1e-12);
  EXPECT_NEAR(rot.x(), 0.0, 1e-12);
  EXPECT_NEAR(rot.z(), 0.0, 1e-12);
  // Rotating the flat plane's normal by +90 deg about x is what the hand does.
  EXPECT_LT((Eigen::AngleAxisd(std::numbers::pi / 2, Eigen::Vector3d::UnitX()) * flat - rot).norm(), 1e-12);
}

TEST(PalmOrientation, CollinearSitesThrow) {
  Json j = TiltedPalmJson();
  j["palm_sites"][2]["pos"] = {0.04, 0.01, 0};
  const HandModel m = HandModel::FromJson(j);
  EXPECT_THROW(m.PalmOrientation(Eigen::VectorXd::Zero(1)), GeometryError);
}

TEST(PalmOrientation, UnitAndOrthogonalToEdges) {
  std::mt19937_64 rng(5);
  for (const auto& name : testing::BundledHands()) {
    const HandModel m = HandModel::Load(DataPath("hands/" + name + ".json"));
    for (int t = 0; t < 20; ++t) {
      const HandKinematics kin = m.ForwardKinematics(RandomQ(m, rng));
      const Eigen::Vector3d n = m.PalmOrientation(kin);
      EXPECT_NEAR(n.norm(), 1.0, 1e-12);
      EXPECT_NEAR(n.dot((kin.palm_sites[1] - kin.palm_sites[0]).normalized()), 0.0, 1e-9);
      EXPECT_NEAR(n.dot((kin.palm_sites[2] - kin.palm_sites[0]).normalized()), 0.0, 1e-9);
    }
  }
}

TEST(HandModel, WristJointsFromPoseRoundTrip) {
  const HandModel m = HandModel::Load(DataPath("hands/toy3.json"));
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd q = RandomQ(m, rng);
    const Pose6 wrist = m.WristPose(m.ForwardKinematics(q));
    const Eigen::Matrix<double, 6, 1> hint = q.head<6>();
    Eigen::VectorXd q2 = q;
    q2.head<6>() = m.WristJointsFromPose(wrist, hint);
    EXPECT_LT(MaxAbsDiff(m.WristPose(m.ForwardKinematics(q2)), wrist), 1e-9);
  }
}

TEST(HandModel, GravityTorquesMatchPotentialGradient) {
  const HandModel m = HandModel::Load(DataPath("hands/toy3.json"));
  const Eigen::Vector3d g(0, 0, -9.81);
  std::mt19937_64 rng(7);
  const Eigen::VectorXd q = RandomQ(m, rng);
  auto potential = [&](const Eigen::VectorXd& x) {
    const HandKinematics kin = m.ForwardKinematics(x);
    double u = 0.0;
    for (size_t l = 0; l < m.links().size(); ++l) u -= m.links()[l].mass * g.dot(kin.link_frames[l] * m.links()[l].com);
    return u;
  };
  const Eigen::VectorXd tau = m.GravityTorques(m.ForwardKinematics(q), g);
  for (int i = 0; i < m.dof(); ++i) {
    Eigen::VectorXd qp = q, qm = q;
    qp[i] += 1e-6;
    qm[i] -= 1e-6;
    EXPECT_NEAR(tau[i], -(potential(qp) - potential(qm)) / 2e-6, 1e-6);
  }
}

}  // namespace
}  // namespace dexxfer
