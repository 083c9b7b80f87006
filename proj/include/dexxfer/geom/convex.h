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

#ifndef DEXXFER_GEOM_CONVEX_H_
#define DEXXFER_GEOM_CONVEX_H_

#include <array>
#include <vector>

#include <Eigen/Core>

namespace dexxfer {

// Closest-feature query result. `normal` points from the surface toward the
// query (outward), also when the query is inside.
struct SurfaceQuery {
  double signed_distance = 0.0;
  Eigen::Vector3d surface_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

struct SegmentQuery {
  double signed_distance = 0.0;
  double t = 0.0;  // parameter of the closest segment point
  Eigen::Vector3d segment_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d surface_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
};

// Convex polytope given as the hull of a vertex set. The triangulated hull is
// computed once at construction.
class ConvexPiece {
 public:
  // Throws GeometryError unless there are >= 4 non-coplanar vertices.
  static ConvexPiece FromVertices(std::vector<Eigen::Vector3d> vertices);

  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const Eigen::Vector3d& center() const { return center_; }
  double bounding_radius() const { return bounding_radius_; }
  Eigen::Vector3d min_corner() const;
  Eigen::Vector3d max_corner() const;

  // Exact signed distance to the polytope boundary (negative inside).
  SurfaceQuery Query(const Eigen::Vector3d& p) const;
  double SignedDistance(const Eigen::Vector3d& p) const;
  // Signed distance of the closest point on segment [a, b].
  SegmentQuery QuerySegment(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const;
  // Max over hull planes of n.p - d; <= tol means p is in the hull.
  double MaxPlaneValue(const Eigen::Vector3d& p) const;

 private:
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<double> offsets_;
  Eigen::Vector3d center_ = Eigen::Vector3d::Zero();
  double bounding_radius_ = 0.0;
};

// Closest point on triangle abc to p.
Eigen::Vector3d ClosestPointOnTriangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                       const Eigen::Vector3d& b, const Eigen::Vector3d& c);

}  // namespace dexxfer

#endif  // DEXXFER_GEOM_CONVEX_H_
