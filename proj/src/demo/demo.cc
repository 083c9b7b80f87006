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

#include "dexxfer/demo/demo.h"

#include <cmath>
#include <limits>
#include <string>

#include "dexxfer/common/errors.h"

namespace dexxfer {

SurfaceQuery ObjectGeometry::Query(const Eigen::Vector3d& p_object) const {
  SurfaceQuery best;
  best.signed_distance = std::numeric_limits<double>::infinity();
  for (const ConvexPiece& piece : pieces) {
    SurfaceQuery q = piece.Query(p_object);
    if (q.signed_distance < best.signed_distance) best = q;
  }
  return best;
}

Eigen::Vector3d ObjectGeometry::min_corner() const {
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
  for (const auto& p : pieces) lo = lo.cwiseMin(p.min_corner());
  return lo;
}

Eigen::Vector3d ObjectGeometry::max_corner() const {
  Eigen::Vector3d hi = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& p : pieces) hi = hi.cwiseMax(p.max_corner());
  return hi;
}

Eigen::Matrix3d ObjectGeometry::Inertia() const {
  const Eigen::Vector3d ext = max_corner() - min_corner();
  const Eigen::Vector3d sq = ext.cwiseProduct(ext);
  return (mass / 12.0) * Eigen::Vector3d(sq.y() + sq.z(), sq.x() + sq.z(), sq.x() + sq.y()).asDiagonal();
}

std::vector<Pose6> DemoSequence::ObjectTrajectory() const {
  std::vector<Pose6> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.object);
  return out;
}

namespace {

std::vector<Eigen::Vector3d> ParsePiece(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected a vertex list");
  std::vector<Eigen::Vector3d> verts;
  for (size_t i = 0; i < j.size(); ++i) verts.push_back(ParseVec3(j[i], where));
  return verts;
}

}  // namespace

DemoSequence DemoFromJson(const Json& j) {
  DemoSequence demo;
  demo.fps = RequireFiniteNumber(RequireField(j, "fps", "demo"), "demo.fps");
  if (demo.fps <= 0.0) throw ParseError("demo.fps", "must be positive");
  const Json& frames = RequireField(j, "frames", "demo");
  if (!frames.is_array()) throw ParseError("demo.frames", "expected an array");
  for (size_t t = 0; t < frames.size(); ++t) {
    const std::string where = "frame " + std::to_string(t);
    DemoFrame f;
    Eigen::VectorXd h = ParseVector(RequireField(frames[t], "hand", where), where + ".hand");
    if (h.size() != kHumanFrameDim) {
      throw DimensionError(where + ": hand state has " + std::to_string(h.size()) +
                           " values, expected 18 (15 fingertip + 3 palm)");
    }
    f.hand = h;
    f.object = PoseFromJson(RequireField(frames[t], "object", where), where + ".object");
    demo.frames.push_back(f);
  }
  if (demo.horizon() < 2) throw ParseError("demo.frames", "need at least 2 frames");

  const Json& geom = RequireField(j, "object_geometry", "demo");
  std::vector<std::vector<Eigen::Vector3d>> raw;
  const Json& pieces = RequireField(geom, "pieces", "object_geometry");
  for (size_t i = 0; i < pieces.size(); ++i) {
    raw.push_back(ParsePiece(pieces[i], "object_geometry.pieces[" + std::to_string(i) + "]"));
  }
  const Eigen::Vector3d com = ParseVec3(RequireField(geom, "com", "object_geometry"), "object_geometry.com");
  const double mass = RequireFiniteNumber(RequireField(geom, "mass", "object_geometry"), "object_geometry.mass");
  if (mass <= 0.0) throw ParseError("object_geometry.mass", "must be positive");
  demo.object = PreprocessObject(raw, com, mass, 0.0);
  return demo;
}

Json DemoToJson(const DemoSequence& demo) {
  Json j;
  j["fps"] = demo.fps;
  Json frames = Json::array();
  for (const DemoFrame& f : demo.frames) {
    Eigen::VectorXd h = f.hand;
    frames.push_back({{"hand", ToJson(h)}, {"object", PoseToJson(f.object)}});
  }
  j["frames"] = frames;
  Json pieces = Json::array();
  for (const ConvexPiece& p : demo.object.pieces) {
    Json verts = Json::array();
    for (const auto& v : p.vertices()) verts.push_back(ToJson(v));
    pieces.push_back(verts);
  }
  j["object_geometry"] = {{"pieces", pieces}, {"com", ToJson(demo.object.com)}, {"mass", demo.object.mass}};
  return j;
}

DemoSequence LoadDemo(const std::filesystem::path& path) {
  return DemoFromJson(ReadJsonFile(path));
}

void SaveDemo(const DemoSequence& demo, const std::filesystem::path& path) {
  WriteJsonFile(path, DemoToJson(demo), -1);
}

std::vector<double> FingertipSurfaceDistances(const DemoSequence& demo, int frame) {
  const DemoFrame& f = demo.frames.at(frame);
  const Pose6 inv = f.object.Inverse();
  std::vector<double> out;
  for (int i = 0; i < 5; ++i) {
    out.push_back(std::abs(demo.object.Query(inv.TransformPoint(HumanFingertip(f.hand, i))).signed_distance));
  }
  return out;
}

int DefaultGraspFrame(const DemoSequence& demo) {
  int best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (int t = 0; t < demo.horizon(); ++t) {
    const Pose6 inv = demo.frames[t].object.Inverse();
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double d = demo.object.Query(inv.TransformPoint(HumanFingertip(demo.frames[t].hand, i))).signed_distance;
      sum += std::max(d, 0.0);
    }
    if (sum < best_sum) {
      best_sum = sum;
      best = t;
    }
  }
  return best;
}

ContactSet ExtractContacts(const DemoSequence& demo, int grasp_frame, double threshold) {
  if (grasp_frame < 0 || grasp_frame >= demo.horizon()) {
    throw ContactError("grasp frame " + std::to_string(grasp_frame) + " outside the demo");
  }
  const DemoFrame& f = demo.frames[grasp_frame];
  const Pose6 inv = f.object.Inverse();
  ContactSet contacts;
  for (int i = 0; i < 5; ++i) {
    const Eigen::Vector3d p = inv.TransformPoint(HumanFingertip(f.hand, i));
    const SurfaceQuery q = demo.object.Query(p);
    if (std::abs(q.signed_distance) < threshold) {
      contacts.points.push_back(q.surface_point);
      contacts.finger_ids.push_back(i);
    }
  }
  if (contacts.size() < 2) {
    throw ContactError("only " + std::to_string(contacts.size()) +
                       " fingertip(s) within the contact threshold at frame " +
                       std::to_string(grasp_frame));
  }
  return contacts;
}

ObjectGeometry PreprocessObject(const std::vector<std::vector<Eigen::Vector3d>>& raw_pieces,
                                const Eigen::Vector3d& com, double mass, double lambda,
                                const Rotation3& orientation) {
  if (raw_pieces.empty()) throw GeometryError("object needs at least one convex piece");
  ObjectGeometry geom;
  geom.mass = mass;
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  for (const auto& raw : raw_pieces) {
    geom.pieces.push_back(ConvexPiece::FromVertices(raw));
    for (const auto& v : raw) {
      const double z = orientation.Rotate(v).z();
      zmin = std::min(zmin, z);
      zmax = std::max(zmax, z);
    }
  }
  const Eigen::Vector3d down_in_object = orientation.Inverse().Rotate(-Eigen::Vector3d::UnitZ());
  geom.com = com + lambda * (zmax - zmin) * down_in_object;
  return geom;
}

}  // namespace dexxfer
