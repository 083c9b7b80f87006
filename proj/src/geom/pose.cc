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

#include "dexxfer/geom/pose.h"

namespace dexxfer {

Pose6 Pose6::FromIsometry(const Eigen::Isometry3d& iso) {
  Pose6 p;
  p.position = iso.translation();
  p.orientation = Rotation3::FromMatrix(iso.linear());
  return p;
}

Eigen::Isometry3d Pose6::ToIsometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = orientation.matrix();
  iso.translation() = position;
  return iso;
}

Pose6 Pose6::Inverse() const {
  Pose6 inv;
  inv.orientation = orientation.Inverse();
  inv.position = -inv.orientation.Rotate(position);
  return inv;
}

Pose6 Compose(const Pose6& a, const Pose6& b) {
  Pose6 c;
  c.orientation = a.orientation * b.orientation;
  c.position = a.orientation.Rotate(b.position) + a.position;
  return c;
}

double MaxAbsDiff(const Pose6& a, const Pose6& b) {
  return (a.Matrix() - b.Matrix()).cwiseAbs().maxCoeff();
}

}  // namespace dexxfer
