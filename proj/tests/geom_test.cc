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
#include "dexxfer/geom/convex.h"
#include "dexxfer/geom/pose.h"
#include "dexxfer/geom/rotation.h"
#include "test_util.h"

namespace dexxfer {
namespace {

using testing::RandomPose;
using testing::RandomQuaternion;

double TraceOracle(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
  return std::acos(std::clamp(c, -1.0, 1.0));
}

TEST(Rotation, NormalizesAndComparesUpToSign) {
  const Rotation3 r(Eigen::Quaterniond(2.0, 0.0, 0.0, 2.0));
  EXPECT_NEAR(r.quaternion().norm(), 1.0, 1e-12);
  const Eigen::Quaterniond q = r.quaternion();
  EXPECT_TRUE(r == Rotation3(Eigen::Quaterniond(-q.w(), -q.x(), -q.y(), -q.z())));
  EXPECT_TRUE(Rotation3(Eigen::Quaterniond(0, 0, 0, 0)) == Rotation3::Identity());
}

TEST(Rotation, MatrixRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Rotation3 r(RandomQuaternion(rng));
    EXPECT_LT((Rotation3::FromMatrix(r.matrix()).matrix() - r.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Geodesic, IdentityAndAntipodal) {
  std::mt19937_64 rng(2);
  const Rotation3 r(RandomQuaternion(rng));
  EXPECT_NEAR(GeodesicDistance(r, r), 0.0, 1e-12);
  const Rotation3 pi_z = Rotation3::FromAxisAngle(Eigen::Vector3d::UnitZ(), std::numbers::pi);
  EXPECT_NEAR(GeodesicDistance(Rotation3::Identity(), pi_z), std::numbers::pi, 1e-12);
}

TEST(Geodesic, MatchesTraceOracle) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Rotation3 a(RandomQuaternion(rng));
    const Rotation3 b(RandomQuaternion(rng));
    EXPECT_NEAR(GeodesicDistance(a, b), TraceOracle(a.matrix(), b.matrix()), 1e-9);
  }
}

TEST(Geodesic, SymmetricNonnegativeTriangle) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Rotation3 a(RandomQuaternion(rng)), b(RandomQuaternion(rng)), c(RandomQuaternion(rng));
    const double ab = GeodesicDistance(a, b);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::numbers::pi + 1e-12);
    EXPECT_NEAR(ab, GeodesicDistance(b, a), 1e-12);
    EXPECT_LE(ab, GeodesicDistance(a, c) + GeodesicDistance(c, b) + 1e-12);
  }
}

TEST(Geodesic, TinyAnglesStayFinite) {
  const Rotation3 a = Rotation3::FromAxisAngle(Eigen::Vector3d::UnitX(), 1e-9);
  const double d = GeodesicDistance(Rotation3::Identity(), a);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_NEAR(d, 1e-9, 1e-12);
  EXPECT_TRUE(std::isfinite(TraceAngle(Eigen::Matrix3d::Identity() * (1.0 + 1e-15))));
}

TEST(Rotation, SlerpEndpointsAndMidpoint) {
  const Rotation3 a = Rotation3::Identity();
  const Rotation3 b = Rotation3::FromAxisAngle(Eigen::Vector3d::UnitZ(), 1.0);
  EXPECT_TRUE(a.Slerp(b, 0.0).IsApprox(a, 1e-12));
  EXPECT_TRUE(a.Slerp(b, 1.0).IsApprox(b, 1e-12));
  EXPECT_NEAR(GeodesicDistance(a, a.Slerp(b, 0.5)), 0.5, 1e-12);
}

TEST(Pose, ComposeIdentityAndInverse) {
  std::mt19937_64 rng(5);
  const Pose6 p = RandomPose(rng);
  EXPECT_LT(MaxAbsDiff(Pose6::Identity() * p, p), 1e-15);
  EXPECT_LT(MaxAbsDiff(p * p.Inverse(), Pose6::Identity()), 1e-9);
  EXPECT_LT(MaxAbsDiff(p.Inverse() * p, Pose6::Identity()), 1e-9);
}

TEST(Pose, ComposeMatchesMatrixOracle) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 200; ++i) {
    const Pose6 a = RandomPose(rng), b = RandomPose(rng);
    const Eigen::Matrix4d oracle = a.Matrix() * b.Matrix();
    EXPECT_LT(((a * b).Matrix() - oracle).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Pose, Associative) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Pose6 a = RandomPose(rng), b = RandomPose(rng), c = RandomPose(rng);
    EXPECT_LT(MaxAbsDiff((a * b) * c, a * (b * c)), 1e-9);
  }
}

std::vector<Eigen::Vector3d> CubeVertices(double h, const Eigen::Vector3d& c = Eigen::Vector3d::Zero()) {
  std::vector<Eigen::Vector3d> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(c + h * Eigen::Vector3d(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1));
  return v;
}

TEST(Convex, RejectsDegenerate) {
  EXPECT_THROW(ConvexPiece::FromVertices({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), GeometryError);
  EXPECT_THROW(ConvexPiece::FromVertices({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), GeometryError);
}

TEST(Convex, CubeSignedDistance) {
  const ConvexPiece cube = ConvexPiece::FromVertices(CubeVertices(0.5));
  EXPECT_NEAR(cube.SignedDistance({0, 0, 0.6}), 0.1, 1e-12);
  EXPECT_NEAR(cube.SignedDistance({0, 0, 0.4}), -0.1, 1e-12);
  EXPECT_NEAR(cube.SignedDistance({0, 0, 0}), -0.5, 1e-12);
  EXPECT_NEAR(cube.SignedDistance({0.6, 0.6, 0.5}), std::sqrt(0.02), 1e-12);
  const SurfaceQuery q = cube.Query({0.2, -0.1, 0.54});
  EXPECT_LT((q.surface_point - Eigen::Vector3d(0.2, -0.1, 0.5)).norm(), 1e-12);
  EXPECT_LT((q.normal - Eigen::Vector3d::UnitZ()).norm(), 1e-12);
}

TEST(Convex, SegmentQueryMatchesSampling) {
  const ConvexPiece cube = ConvexPiece::FromVertices(CubeVertices(0.025));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.06, 0.06);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Vector3d a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
    double best = 1e9;
    for (int k = 0; k <= 2000; ++k) best = std::min(best, cube.SignedDistance(a + (b - a) * (k / 2000.0)));
    EXPECT_NEAR(cube.QuerySegment(a, b).signed_distance, best, 1e-4);
  }
}

TEST(Convex, HullContainsAllVertices) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 60; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  const ConvexPiece hull = ConvexPiece::FromVertices(pts);
  for (const auto& p : pts) EXPECT_LE(hull.MaxPlaneValue(p), 1e-9);
}

}  // namespace
}  // namespace dexxfer
