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
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "dexxfer/common/errors.h"
#include "dexxfer/contact/env.h"
#include "dexxfer/wrist/planner.h"
#include "test_util.h"
#include "toy_scene.h"

namespace dexxfer {
namespace {

using testing::RandomPose;
using testing::ToyScene;

std::vector<Pose6> RandomTrajectory(std::mt19937_64& rng, int n) {
  std::vector<Pose6> out;
  for (int i = 0; i < n; ++i) out.push_back(RandomPose(rng, 0.5));
  return out;
}

TEST(PlanWrist, GraspFrameReturnsGraspWrist) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Pose6 wrist = RandomPose(rng, 0.3);
    std::vector<Pose6> objects = RandomTrajectory(rng, 4);
    const ManipulationPlan m = PlanWrist(objects, wrist, Eigen::VectorXd::Zero(3));
    EXPECT_LT(MaxAbsDiff(m.wrist[0], wrist), 1e-12);
    EXPECT_EQ(MaxAbsDiff(m.wrist_grasp, wrist), 0.0);
  }
}

TEST(PlanWrist, PureTranslationMovesWristByTheSameOffset) {
  std::mt19937_64 rng(2);
  const Pose6 wrist = RandomPose(rng, 0.3);
  const Pose6 o0 = RandomPose(rng, 0.3);
  const Eigen::Vector3d d(0.02, -0.07, 0.11);
  Pose6 o1 = o0;
  o1.position += d;
  const ManipulationPlan m = PlanWrist({o0, o1}, wrist, Eigen::VectorXd::Zero(0));
  EXPECT_LT((m.wrist[1].position - wrist.position - d).norm(), 1e-12);
  EXPECT_LT(MaxAbsDiff(Pose6{Eigen::Vector3d::Zero(), m.wrist[1].orientation},
                       Pose6{Eigen::Vector3d::Zero(), wrist.orientation}),
            1e-12);
}

TEST(PlanWrist, RelativeTransformIsConstant) {
  std::mt19937_64 rng(3);
  const Pose6 wrist = RandomPose(rng, 0.3);
  Pose6 o0 = RandomPose(rng, 0.3);
  // 30 degrees about an axis through the object origin, plus random frames.
  std::vector<Pose6> objects{o0};
  Pose6 turned = o0;
  turned.orientation = Rotation3(Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi / 6, Eigen::Vector3d(1, 2, 3).normalized()))) *
                       o0.orientation;
  objects.push_back(turned);
  for (const Pose6& p : RandomTrajectory(rng, 20)) objects.push_back(p);
  const ManipulationPlan m = PlanWrist(objects, wrist, Eigen::VectorXd::Zero(0));
  const Pose6 rel0 = wrist.Inverse() * o0;
  for (int t = 0; t < m.length(); ++t) {
    EXPECT_LT(MaxAbsDiff(m.wrist[t].Inverse() * objects[t], rel0), 1e-9) << "frame " << t;
  }
}

TEST(PlanWrist, EquivariantUnderWorldTransform) {
  std::mt19937_64 rng(4);
  const Pose6 wrist = RandomPose(rng, 0.3);
  const std::vector<Pose6> objects = RandomTrajectory(rng, 10);
  const Pose6 g = RandomPose(rng, 1.0);
  std::vector<Pose6> moved;
  for (const Pose6& o : objects) moved.push_back(g * o);
  const ManipulationPlan a = PlanWrist(objects, wrist, Eigen::VectorXd::Zero(0));
  const ManipulationPlan b = PlanWrist(moved, g * wrist, Eigen::VectorXd::Zero(0));
  for (int t = 0; t < a.length(); ++t) EXPECT_LT(MaxAbsDiff(g * a.wrist[t], b.wrist[t]), 1e-9);
}

TEST(PlanWrist, EmptyTrajectoryIsAnError) {
  EXPECT_THROW(PlanWrist({}, Pose6{}, Eigen::VectorXd::Zero(0)), ConfigError);
}

TEST(PlanWrist, JsonRoundTripIsExact) {
  std::mt19937_64 rng(5);
  const ManipulationPlan m = PlanWrist(RandomTrajectory(rng, 5), RandomPose(rng), Eigen::Vector3d(0.1, 0.2, 0.3));
  // Quaternions are renormalized on load, so compare to rounding.
  const ManipulationPlan back = ManipulationPlan::FromJson(Json::parse(m.ToJson().dump()));
  ASSERT_EQ(back.length(), m.length());
  EXPECT_LT(MaxAbsDiff(back.wrist_grasp, m.wrist_grasp), 1e-15);
  for (int t = 0; t < m.length(); ++t) {
    EXPECT_LT(MaxAbsDiff(back.wrist[t], m.wrist[t]), 1e-15);
    EXPECT_LT(MaxAbsDiff(back.objects[t], m.objects[t]), 1e-15);
  }
  EXPECT_EQ(back.finger_hold, m.finger_hold);
}

TEST(BlendObjectTrajectory, StartsAtAchievedAndEndsOnDemo) {
  std::mt19937_64 rng(6);
  const Pose6 anchor = RandomPose(rng, 0.3);
  Pose6 achieved = anchor;
  achieved.position += Eigen::Vector3d(0.03, -0.02, 0.01);
  achieved.orientation = Rotation3(Eigen::Quaterniond(Eigen::AngleAxisd(0.2, Eigen::Vector3d::UnitZ()))) * anchor.orientation;
  const std::vector<Pose6> tail = RandomTrajectory(rng, 30);
  const std::vector<Pose6> out = BlendObjectTrajectory(achieved, anchor, tail, 12);
  ASSERT_EQ(out.size(), tail.size() + 1);
  EXPECT_EQ(MaxAbsDiff(out[0], achieved), 0.0);
  for (size_t t = 12; t < tail.size(); ++t) EXPECT_EQ(MaxAbsDiff(out[t + 1], tail[t]), 0.0) << t;
  // Offset shrinks monotonically inside the blend.
  double prev = 1e9;
  for (int t = 0; t < 12; ++t) {
    const double off = (out[t + 1].position - tail[t].position).norm();
    EXPECT_LE(off, prev + 1e-15);
    prev = off;
  }
}

TEST(BlendObjectTrajectory, NoOffsetReproducesDemo) {
  std::mt19937_64 rng(7);
  const Pose6 anchor = RandomPose(rng, 0.3);
  const std::vector<Pose6> tail = RandomTrajectory(rng, 8);
  const std::vector<Pose6> out = BlendObjectTrajectory(anchor, anchor, tail, 5);
  for (size_t t = 0; t < tail.size(); ++t) EXPECT_LT(MaxAbsDiff(out[t + 1], tail[t]), 1e-12);
}

// ---- tracking from a trained grasp on the toy scene

class TrackingTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const ToyScene& s = ToyScene::Get();
    const EpisodeResult& g = s.TrainedGrasp();
    ASSERT_FALSE(g.states.empty());
    start_ = g.states.back();
    const HandModel& hand = *s.hand;
    wrist_ = hand.WristPose(hand.ForwardKinematics(start_.q));
    hold_ = g.controls.back().tail(hand.dof() - kFloatingBaseDofs);
  }

  TrackingResult Track(const std::vector<Pose6>& objects) const {
    const ToyScene& s = ToyScene::Get();
    return TrackManipulation(PlanWrist(objects, wrist_, hold_), *s.world, start_, s.config.wrist_gain_scale);
  }

  static double MeanPositionError(const TrackingResult& r, const std::vector<Pose6>& objects) {
    double sum = 0.0;
    for (size_t t = 0; t < r.states.size(); ++t) {
      sum += (r.states[t].object.pose.position - objects[t + 1].position).norm();
    }
    return sum / r.states.size();
  }

  WorldState start_;
  Pose6 wrist_;
  Eigen::VectorXd hold_;
};

TEST_F(TrackingTest, TrainedGraspHolds) {
  EXPECT_TRUE(start_.HandObjectContact());
  EXPECT_GE(ToyScene::Get().TrainedGrasp().hold_steps, HoldSteps(ToyScene::Get().config.sim));
}

TEST_F(TrackingTest, StationaryTrajectoryHolds) {
  const std::vector<Pose6> objects(121, start_.object.pose);
  const TrackingResult r = Track(objects);
  ASSERT_EQ(r.states.size(), 120u);
  EXPECT_FALSE(r.dropped);
  EXPECT_LT(MeanPositionError(r, objects), 5e-3);
}

TEST_F(TrackingTest, SlowLiftIsFollowed) {
  std::vector<Pose6> objects;
  const int n = 240;  // 2 s at 120 Hz
  for (int t = 0; t <= n; ++t) {
    const double s = static_cast<double>(t) / n;
    Pose6 p = start_.object.pose;
    p.position.z() += 0.1 * (10 * std::pow(s, 3) - 15 * std::pow(s, 4) + 6 * std::pow(s, 5));
    objects.push_back(p);
  }
  const TrackingResult r = Track(objects);
  EXPECT_FALSE(r.dropped);
  EXPECT_LT(MeanPositionError(r, objects), 0.02);
  EXPECT_GT(r.states.back().object.pose.position.z(), start_.object.pose.position.z() + 0.08);
}

TEST_F(TrackingTest, TeleportIsDetectedAsDrop) {
  std::vector<Pose6> objects(121, start_.object.pose);
  for (int t = 10; t < 121; ++t) objects[t].position.z() += 1.0;
  const TrackingResult r = Track(objects);
  EXPECT_TRUE(r.dropped);
  // Targets start at plan frame 1 and the velocity feedforward looks one
  // frame ahead, so the jump is first commanded at step 8.
  EXPECT_GE(r.drop_step, 8);
  EXPECT_LE(static_cast<int>(r.states.size()), 120);
}

}  // namespace
}  // namespace dexxfer
