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


#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "dexxfer/common/errors.h"
#include "dexxfer/eval/metrics.h"
#include "test_util.h"

namespace dexxfer {
namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

Pose6 MakePose(const Eigen::Vector3d& p, const Eigen::Vector3d& axis = Eigen::Vector3d::UnitZ(), double angle = 0.0) {
  Pose6 pose;
  pose.position = p;
  pose.orientation = Rotation3::FromAxisAngle(axis, angle);
  return pose;
}

// ---- Ep / Er

TEST(EpEr, IdenticalTrajectories) {
  std::mt19937_64 rng(1);
  std::vector<Pose6> o;
  for (int i = 0; i < 30; ++i) o.push_back(testing::RandomPose(rng));
  const PoseErrors e = EpEr(o, o);
  EXPECT_EQ(e.ep, 0.0);
  EXPECT_NEAR(e.er, 0.0, 1e-6);
}

TEST(EpEr, ConstantOffset) {
  std::mt19937_64 rng(2);
  std::vector<Pose6> o, shifted;
  for (int i = 0; i < 30; ++i) {
    o.push_back(testing::RandomPose(rng));
    shifted.push_back(o.back());
    shifted.back().position += Eigen::Vector3d(0.0, 0.006, 0.008);
  }
  const PoseErrors e = EpEr(o, shifted);
  EXPECT_NEAR(e.ep, 0.01, 1e-12);
  EXPECT_NEAR(e.er, 0.0, 1e-6);
}

TEST(EpEr, MatchesPerFrameRecomputation) {
  std::mt19937_64 rng(3);
  std::vector<Pose6> a, b;
  for (int i = 0; i < 50; ++i) {
    a.push_back(testing::RandomPose(rng));
    b.push_back(testing::RandomPose(rng));
  }
  double ep = 0.0, er = 0.0;
  for (int i = 0; i < 50; ++i) {
    ep += (a[i].position - b[i].position).norm();
    const double dot = std::abs(a[i].orientation.quaternion().coeffs().dot(b[i].orientation.quaternion().coeffs()));
    er += 2.0 * std::acos(std::min(1.0, dot)) / kDegree;
  }
  const PoseErrors e = EpEr(a, b);
  EXPECT_NEAR(e.ep, ep / 50, 1e-9);
  EXPECT_NEAR(e.er, er / 50, 1e-6);
}

TEST(EpEr, ResamplesExecutedByNearestIndex) {
  std::vector<Pose6> ref, exec;
  for (int i = 0; i < 5; ++i) ref.push_back(MakePose({0.1 * i, 0.0, 0.0}));
  for (int i = 0; i < 9; ++i) exec.push_back(MakePose({0.05 * i, 0.0, 0.0}));
  EXPECT_NEAR(EpEr(ref, exec).ep, 0.0, 1e-15);
  EXPECT_THROW(EpEr({}, exec), DimensionError);
}

// ---- semantics

SemanticOptions Defaults() { return SemanticOptions{}; }

TEST(Semantics, StaticTrajectoryIsEmpty) {
  const std::vector<Pose6> o(60, MakePose({0.2, 0.1, 0.05}));
  EXPECT_TRUE(EncodeSemantics(o).empty());
}

TEST(Semantics, WindowThresholds) {
  const Pose6 a = MakePose({0.0, 0.0, 0.1});
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.15})), kLift);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.05})), kFall);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.04, 0.0, 0.1})), kTranslation);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.1}, Eigen::Vector3d::UnitY(), 20 * kDegree)), kTilt);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.1}, Eigen::Vector3d::UnitZ(), 10 * kDegree)), kRotation);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.1}, Eigen::Vector3d::UnitZ(), 4 * kDegree)), kMotionless);
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.0, 0.0, 0.12})), kMotionless);
  // Vertical wins only when it dominates the horizontal motion.
  EXPECT_EQ(ClassifyWindow(a, MakePose({0.05, 0.0, 0.14})), kTranslation);
}

TEST(Semantics, RotationBelowThresholdIsFiltered) {
  std::vector<Pose6> ten, four;
  for (int t = 0; t < 10; ++t) {
    ten.push_back(MakePose({0.0, 0.0, 0.0}, Eigen::Vector3d::UnitZ(), 10.0 * kDegree * t / 9));
    four.push_back(MakePose({0.0, 0.0, 0.0}, Eigen::Vector3d::UnitZ(), 4.0 * kDegree * t / 9));
  }
  EXPECT_EQ(EncodeSemantics(ten), std::vector<int>{kRotation});
  EXPECT_TRUE(EncodeSemantics(four).empty());
}

// 30 frames of lift at 5 mm per frame, 30 of tilt about x at 2 degrees per
// frame, 30 of fall at 5 mm per frame.
std::vector<Pose6> LiftTiltFall() {
  std::vector<Pose6> o;
  for (int t = 0; t < 90; ++t) {
    double z = 0.005 * std::min(t, 29);
    if (t > 59) z -= 0.005 * (t - 59);
    const double angle = 2.0 * kDegree * std::clamp(t - 29, 0, 30);
    o.push_back(MakePose({0.3, 0.0, z}, Eigen::Vector3d::UnitX(), angle));
  }
  return o;
}

TEST(Semantics, LiftTiltFall) {
  // Window s covers frames s..s+9. Windows 0-20: dz = 0.045 (lift). Window 25:
  // dz = 0.02, tilt 10 deg (motionless). Windows 30-50: tilt 18 deg. Window
  // 55: tilt 8 deg, dz = -0.025 (motionless). Windows 60-80: dz = -0.045.
  const std::vector<int> expected_windows{1, 1, 1, 1, 1, 0, 4, 4, 4, 4, 4, 0, 2, 2, 2, 2, 2};
  EXPECT_EQ(WindowLabels(LiftTiltFall()), expected_windows);
  EXPECT_EQ(EncodeSemantics(LiftTiltFall()), (std::vector<int>{kLift, kTilt, kFall}));
}

TEST(Semantics, InvariantToIntegerUpsampling) {
  const std::vector<Pose6> o = LiftTiltFall();
  std::vector<Pose6> up;
  for (size_t t = 0; t + 1 < o.size(); ++t) {
    up.push_back(o[t]);
    Pose6 mid;
    mid.position = 0.5 * (o[t].position + o[t + 1].position);
    mid.orientation = o[t].orientation.Slerp(o[t + 1].orientation, 0.5);
    up.push_back(mid);
  }
  up.push_back(o.back());
  SemanticOptions opt;
  opt.window = 19;  // same time span as 10 frames at the original rate
  opt.step = 10;
  EXPECT_EQ(EncodeSemantics(up, opt), EncodeSemantics(o));
}

TEST(Semantics, ShortTrajectoryIsAnError) {
  EXPECT_THROW(EncodeSemantics(std::vector<Pose6>(9)), ConfigError);
}

// ---- DTW and TSR

// All monotone warping paths from (0, 0) to (n-1, m-1); returns the best
// (cost, length) pair in lexicographic order.
std::pair<int, int> BruteForceDtw(const std::vector<int>& a, const std::vector<int>& b) {
  std::pair<int, int> best{1 << 30, 1 << 30};
  std::function<void(size_t, size_t, int, int)> walk = [&](size_t i, size_t j, int cost, int len) {
    cost += a[i] != b[j];
    ++len;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, std::make_pair(cost, len));
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, cost, len);
    if (j + 1 < b.size()) walk(i, j + 1, cost, len);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, cost, len);
  };
  walk(0, 0, 0, 0);
  return best;
}

TEST(Dtw, HandComputedExamples) {
  EXPECT_EQ(Dtw({1, 4, 2}, {1, 4, 2}).distance, 0.0);
  const DtwResult single = Dtw({1}, {5});
  EXPECT_EQ(single.distance, 1.0);
  const DtwResult r = Dtw({1, 4, 2}, {1, 4, 4, 2});
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_EQ(r.path_length, 4);
  EXPECT_EQ(r.distance, 0.0);
  const DtwResult m = Dtw({1, 4, 2}, {1, 3, 2}, DtwNormalization::kMaxLength);
  EXPECT_DOUBLE_EQ(m.distance, 1.0 / 3.0);
}

TEST(Dtw, MatchesBruteForceAndProperties) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> label(1, 5), len(1, 5);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (int& x : a) x = label(rng);
    for (int& x : b) x = label(rng);
    const auto [cost, length] = BruteForceDtw(a, b);
    const DtwResult r = Dtw(a, b);
    EXPECT_EQ(r.cost, cost);
    EXPECT_EQ(r.path_length, length);
    EXPECT_DOUBLE_EQ(r.distance, static_cast<double>(cost) / length);
    EXPECT_DOUBLE_EQ(Dtw(b, a).distance, r.distance);
    EXPECT_LE(r.distance, 1.0);
    EXPECT_EQ(Dtw(a, a).distance, 0.0);
  }
}

TEST(Tsr, Cases) {
  EXPECT_TRUE(Tsr({1, 4, 2}, {1, 4, 2}).success);
  const TsrResult miss = Tsr({1}, {5});
  EXPECT_EQ(miss.distance, 1.0);
  EXPECT_FALSE(miss.success);
  EXPECT_TRUE(Tsr({1, 4, 2}, {1, 4, 4, 2}).success);
  const TsrResult both = Tsr({}, {});
  EXPECT_EQ(both.distance, 0.0);
  EXPECT_TRUE(both.success);
  const TsrResult none = Tsr({1, 2}, {});
  EXPECT_EQ(none.distance, 1.0);
  EXPECT_FALSE(none.success);
  // 0.3 is exclusive.
  EXPECT_FALSE(Tsr({1, 1, 1, 3, 3, 3, 3, 5, 5, 5}, {1, 1, 1, 3, 3, 3, 3, 2, 2, 2}).success);
  for (int l = 1; l <= 5; ++l) EXPECT_TRUE(Tsr({l, 3, l}, {l, 3, l}).success);
}

// ---- success rates and reports

TEST(SuccessRates, Thresholds) {
  EXPECT_TRUE(SrGrasp(0.04, 60, 60));
  EXPECT_FALSE(SrGrasp(0.06, 60, 60));
  EXPECT_FALSE(SrGrasp(0.04, 59, 60));
  EXPECT_TRUE(SrFollow(false));
  EXPECT_FALSE(SrFollow(true));
}

TEST(MetricReport, JsonAndTable) {
  MetricReport r;
  r.sr_grasp = true;
  r.ep = 0.0123;
  r.er = 4.5;
  r.tsr = true;
  r.human_semantics = {1, 3};
  r.robot_semantics = {1};
  const MetricReport back = MetricReport::FromJson(Json::parse(r.ToJson().dump()));
  EXPECT_EQ(back.ToJson(), r.ToJson());
  const std::string t = r.Table();
  const size_t g = t.find("SR Grasp"), f = t.find("SR Follow"), ep = t.find("Ep"), er = t.find("Er"),
               tsr = t.find("TSR");
  EXPECT_LT(g, f);
  EXPECT_LT(f, ep);
  EXPECT_LT(ep, er);
  EXPECT_LT(er, tsr);
  EXPECT_NE(t.find("0.0123"), std::string::npos);
}

TEST(MetricReport, CorpusMeans) {
  MetricReport a, b;
  a.sr_grasp = true;
  a.ep = 0.01;
  b.ep = 0.03;
  b.tsr = true;
  const CorpusSummary s = Summarize({a, b});
  EXPECT_EQ(s.tasks, 2);
  EXPECT_DOUBLE_EQ(s.sr_grasp, 0.5);
  EXPECT_DOUBLE_EQ(s.tsr, 0.5);
  EXPECT_DOUBLE_EQ(s.ep, 0.02);
  EXPECT_EQ(Summarize({}).tasks, 0);
}

}  // namespace
}  // namespace dexxfer
