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

#include "dexxfer/geom/rotation.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dexxfer {

Rotation3::Rotation3(const Eigen::Quaterniond& q) : q_(q) {
  const double n = q_.norm();
  if (n < 1e-300 || !std::isfinite(n)) {
    q_ = Eigen::Quaterniond::Identity();
  } else {
    q_.coeffs() /= n;
  }
}

Rotation3 Rotation3::FromWxyz(double w, double x, double y, double z) {
  return Rotation3(Eigen::Quaterniond(w, x, y, z));
}

Rotation3 Rotation3::FromMatrix(const Eigen::Matrix3d& m) {
  return Rotation3(Eigen::Quaterniond(m));
}

Rotation3 Rotation3::FromAxisAngle(const Eigen::Vector3d& axis, double angle) {
  return Rotation3(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())));
}

Rotation3 Rotation3::FromRotationVector(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-15) {
    // first-order expansion keeps tiny rotations differentiable
    return Rotation3(Eigen::Quaterniond(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z()));
  }
  return FromAxisAngle(v / angle, angle);
}

double Rotation3::Angle() const {
  // atan2 form is accurate near both 0 and pi.
  const double s = q_.vec().norm();
  return 2.0 * std::atan2(s, std::abs(q_.w()));
}

Rotation3 Rotation3::Slerp(const Rotation3& to, double t) const {
  return Rotation3(q_.slerp(t, to.q_));
}

Rotation3 Rotation3::operator*(const Rotation3& other) const {
  return Rotation3(q_ * other.q_);
}

bool Rotation3::operator==(const Rotation3& other) const {
  // Same rotation up to quaternion sign and normalization rounding.
  constexpr double kTol = 4.0 * std::numeric_limits<double>::epsilon();
  return (q_.coeffs() - other.q_.coeffs()).cwiseAbs().maxCoeff() <= kTol ||
         (q_.coeffs() + other.q_.coeffs()).cwiseAbs().maxCoeff() <= kTol;
}

bool Rotation3::IsApprox(const Rotation3& other, double tol) const {
  return GeodesicDistance(*this, other) <= tol;
}

double GeodesicDistance(const Rotation3& a, const Rotation3& b) {
  return (a.Inverse() * b).Angle();
}

double AngleBetween(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

double TraceAngle(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace dexxfer
