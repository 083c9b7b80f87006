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

#ifndef DEXXFER_DEMO_DEMO_H_
#define DEXXFER_DEMO_DEMO_H_

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "dexxfer/common/json_util.h"
#include "dexxfer/geom/convex.h"
#include "dexxfer/geom/pose.h"

namespace dexxfer {

inline constexpr int kHumanFrameDim = 18;
inline constexpr double kContactExtractionThreshold = 0.05;  // m

using HumanFrame = Eigen::Matrix<double, kHumanFrameDim, 1>;

// Fingertip `finger` (0 = thumb .. 4 = pinky) of a human frame.
inline Eigen::Vector3d HumanFingertip(const HumanFrame& h, int finger) {
  return h.segment<3>(3 * finger);
}
inline Eigen::Vector3d HumanPalmOrientation(const HumanFrame& h) {
  return h.tail<3>();
}

// Object collision geometry in the object frame.
struct ObjectGeometry {
  std::vector<ConvexPiece> pieces;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  double mass = 0.1;

  // Signed distance to the union of pieces (object frame).
  SurfaceQuery Query(const Eigen::Vector3d& p_object) const;
  // Axis-aligned bounds over all pieces (object frame).
  Eigen::Vector3d min_corner() const;
  Eigen::Vector3d max_corner() const;
  // Solid-box approximation of the inertia about the COM.
  Eigen::Matrix3d Inertia() const;
};

struct DemoFrame {
  HumanFrame hand = HumanFrame::Zero();
  Pose6 object;
};

struct DemoSequence {
  double fps = 120.0;
  std::vector<DemoFrame> frames;
  ObjectGeometry object;

  int horizon() const { return static_cast<int>(frames.size()); }
  std::vector<Pose6> ObjectTrajectory() const;
};

DemoSequence DemoFromJson(const Json& j);
Json DemoToJson(const DemoSequence& demo);
DemoSequence LoadDemo(const std::filesystem::path& path);
void SaveDemo(const DemoSequence& demo, const std::filesystem::path& path);

// Contact points in the object frame and the human finger that made each.
struct ContactSet {
  std::vector<Eigen::Vector3d> points;
  std::vector<int> finger_ids;
  int size() const { return static_cast<int>(points.size()); }
};

// Distance from each human fingertip to the object surface at `frame`.
std::vector<double> FingertipSurfaceDistances(const DemoSequence& demo, int frame);

// Frame minimizing the summed fingertip-to-object distance (first on ties).
int DefaultGraspFrame(const DemoSequence& demo);

// Fingertips closer than `threshold` to the surface at `grasp_frame` become
// contacts at their closest surface points. Throws ContactError when fewer than
// two qualify.
ContactSet ExtractContacts(const DemoSequence& demo, int grasp_frame,
                           double threshold = kContactExtractionThreshold);

// Lowers the COM along world -z (at `orientation`) by `lambda` times the
// world-z extent of the geometry.
ObjectGeometry PreprocessObject(const std::vector<std::vector<Eigen::Vector3d>>& raw_pieces,
                                const Eigen::Vector3d& com, double mass, double lambda = 0.2,
                                const Rotation3& orientation = Rotation3::Identity());

}  // namespace dexxfer

#endif  // DEXXFER_DEMO_DEMO_H_
