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

#ifndef DEXXFER_GEOM_POSE_H_
#define DEXXFER_GEOM_POSE_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dexxfer/geom/rotation.h"

namespace dexxfer {

// Rigid transform: x_parent = orientation * x_child + position.
struct Pose6 {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Rotation3 orientation;

  static Pose6 Identity() { return {}; }
  static Pose6 FromIsometry(const Eigen::Isometry3d& iso);
  Eigen::Isometry3d ToIsometry() const;
  Eigen::Matrix4d Matrix() const { return ToIsometry().matrix(); }

  Pose6 Inverse() const;
  Eigen::Vector3d TransformPoint(const Eigen::Vector3d& p) const {
    return orientation.Rotate(p) + position;
  }
};

// a * b, i.e. apply b first, then a.
Pose6 Compose(const Pose6& a, const Pose6& b);
inline Pose6 operator*(const Pose6& a, const Pose6& b) { return Compose(a, b); }

// Maximum absolute difference of homogeneous matrices.
double MaxAbsDiff(const Pose6& a, const Pose6& b);

}  // namespace dexxfer

#endif  // DEXXFER_GEOM_POSE_H_
