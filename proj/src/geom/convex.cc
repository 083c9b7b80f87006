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

#include "dexxfer/geom/convex.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/Geometry>

#include "dexxfer/common/errors.h"

namespace dexxfer {
namespace {

struct HullFace {
  std::array<int, 3> v;
  Eigen::Vector3d n;
  double d;
  bool alive = true;
};

HullFace MakeFace(const std::vector<Eigen::Vector3d>& pts, int a, int b, int c) {
  HullFace f;
  f.v = {a, b, c};
  f.n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double len = f.n.norm();
  if (len > 0.0) f.n /= len;
  f.d = f.n.dot(pts[a]);
  return f;
}

// Incremental hull. Returns outward-oriented triangles.
std::vector<std::array<int, 3>> BuildHull(const std::vector<Eigen::Vector3d>& pts) {
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw GeometryError("convex piece needs at least 4 vertices");
  Eigen::Vector3d lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double scale = std::max((hi - lo).norm(), 1e-300);
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from extreme points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).norm();
    if (d > best) { best = d; i1 = i; }
  }
  if (best <= eps) throw GeometryError("convex piece vertices are coincident");
  best = -1.0;
  const Eigen::Vector3d dir = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const double d = (pts[i] - pts[i0]).cross(dir).norm();
    if (d > best) { best = d; i2 = i; }
  }
  if (best <= eps) throw GeometryError("convex piece vertices are collinear");
  best = -1.0;
  const Eigen::Vector3d pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    const double d = std::abs(pn.dot(pts[i] - pts[i0]));
    if (d > best) { best = d; i3 = i; }
  }
  if (best <= eps) throw GeometryError("convex piece vertices are coplanar");

  std::vector<HullFace> faces;
  const Eigen::Vector3d inner = 0.25 * (pts[i0] + pts[i1] + pts[i2] + pts[i3]);
  auto add_oriented = [&](int a, int b, int c) {
    HullFace f = MakeFace(pts, a, b, c);
    if (f.n.dot(inner) - f.d > 0.0) f = MakeFace(pts, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (faces[f].alive && faces[f].n.dot(pts[p]) - faces[f].d > eps) visible.push_back(f);
    }
    if (visible.empty()) continue;
    std::map<std::pair<int, int>, int> edge_owner;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
      if (!faces[f].alive) continue;
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) edge_owner[{v[k], v[(k + 1) % 3]}] = f;
    }
    std::vector<bool> is_visible(faces.size(), false);
    for (int f : visible) is_visible[f] = true;
    std::vector<std::pair<int, int>> horizon;
    for (int f : visible) {
      const auto& v = faces[f].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        auto twin = edge_owner.find({b, a});
        if (twin == edge_owner.end() || !is_visible[twin->second]) horizon.emplace_back(a, b);
      }
    }
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : horizon) faces.push_back(MakeFace(pts, a, b, p));
  }

  std::vector<std::array<int, 3>> tris;
  for (const HullFace& f : faces) {
    if (f.alive) tris.push_back(f.v);
  }
  return tris;
}

}  // namespace

Eigen::Vector3d ClosestPointOnTriangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                       const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  // Voronoi-region walk (Ericson, Real-Time Collision Detection 5.1.5).
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

ConvexPiece ConvexPiece::FromVertices(std::vector<Eigen::Vector3d> vertices) {
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw GeometryError("convex piece has a non-finite vertex");
  }
  ConvexPiece piece;
  piece.triangles_ = BuildHull(vertices);
  piece.vertices_ = std::move(vertices);
  for (const auto& t : piece.triangles_) {
    HullFace f = MakeFace(piece.vertices_, t[0], t[1], t[2]);
    piece.normals_.push_back(f.n);
    piece.offsets_.push_back(f.d);
  }
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& v : piece.vertices_) sum += v;
  piece.center_ = sum / static_cast<double>(piece.vertices_.size());
  for (const auto& v : piece.vertices_) {
    piece.bounding_radius_ = std::max(piece.bounding_radius_, (v - piece.center_).norm());
  }
  return piece;
}

Eigen::Vector3d ConvexPiece::min_corner() const {
  Eigen::Vector3d lo = vertices_.front();
  for (const auto& v : vertices_) lo = lo.cwiseMin(v);
  return lo;
}

Eigen::Vector3d ConvexPiece::max_corner() const {
  Eigen::Vector3d hi = vertices_.front();
  for (const auto& v : vertices_) hi = hi.cwiseMax(v);
  return hi;
}

double ConvexPiece::MaxPlaneValue(const Eigen::Vector3d& p) const {
  double s = -1e300;
  for (size_t i = 0; i < normals_.size(); ++i) s = std::max(s, normals_[i].dot(p) - offsets_[i]);
  return s;
}

SurfaceQuery ConvexPiece::Query(const Eigen::Vector3d& p) const {
  SurfaceQuery out;
  size_t arg = 0;
  double s = -1e300;
  for (size_t i = 0; i < normals_.size(); ++i) {
    const double v = normals_[i].dot(p) - offsets_[i];
    if (v > s) {
      s = v;
      arg = i;
    }
  }
  if (s <= 0.0) {
    // Inside: the nearest boundary point is the projection on the nearest plane.
    out.signed_distance = s;
    out.surface_point = p - s * normals_[arg];
    out.normal = normals_[arg];
    return out;
  }
  double best = 1e300;
  for (size_t i = 0; i < triangles_.size(); ++i) {
    if (normals_[i].dot(p) - offsets_[i] <= 0.0) continue;
    const auto& t = triangles_[i];
    const Eigen::Vector3d c = ClosestPointOnTriangle(p, vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
    const double d = (p - c).squaredNorm();
    if (d < best) {
      best = d;
      out.surface_point = c;
    }
  }
  out.signed_distance = std::sqrt(best);
  out.normal = out.signed_distance > 0.0 ? Eigen::Vector3d((p - out.surface_point) / out.signed_distance)
                                         : normals_[arg];
  return out;
}

double ConvexPiece::SignedDistance(const Eigen::Vector3d& p) const {
  return Query(p).signed_distance;
}

SegmentQuery ConvexPiece::QuerySegment(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
  // Signed distance to a convex set is convex, so its restriction to the
  // segment is unimodal: golden-section search.
  const Eigen::Vector3d ab = b - a;
  auto f = [&](double t) { return SignedDistance(a + t * ab); };
  double lo = 0.0, hi = 1.0;
  if (ab.squaredNorm() > 0.0) {
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 48 && hi - lo > 1e-10; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kInvPhi * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kInvPhi * (hi - lo);
        f2 = f(x2);
      }
    }
  }
  double t = 0.5 * (lo + hi);
  SurfaceQuery best = Query(a + t * ab);
  for (double end : {0.0, 1.0}) {
    SurfaceQuery q = Query(a + end * ab);
    if (q.signed_distance < best.signed_distance) {
      best = q;
      t = end;
    }
  }
  SegmentQuery out;
  out.t = t;
  out.segment_point = a + t * ab;
  out.signed_distance = best.signed_distance;
  out.surface_point = best.surface_point;
  out.normal = best.normal;
  return out;
}

}  // namespace dexxfer
