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

#ifndef DEXXFER_GEOM_ROTATION_H_
#define DEXXFER_GEOM_ROTATION_H_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dexxfer {

// Unit quaternion rotation. q and -q represent the same rotation and compare
// equal under operator== (coefficients agree to a few ulps).
class Rotation3 {
 public:
  Rotation3() : q_(Eigen::Quaterniond::Identity()) {}
  // Normalizes the input; a zero quaternion yields identity.
  explicit Rotation3(const Eigen::Quaterniond& q);
  static Rotation3 FromWxyz(double w, double x, double y, double z);
  static Rotation3 FromMatrix(const Eigen::Matrix3d& m);
  static Rotation3 FromAxisAngle(const Eigen::Vector3d& axis, double angle);
  // Rotation vector (axis * angle).
  static Rotation3 FromRotationVector(const Eigen::Vector3d& v);
  static Rotation3 Identity() { return Rotation3(); }

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }
  Eigen::Vector3d Rotate(const Eigen::Vector3d& v) const { return q_ * v; }
  Rotation3 Inverse() const { return Rotation3(q_.conjugate(), true); }
  // Rotation angle in [0, pi].
  double Angle() const;
  // Spherical interpolation along the shortest arc.
  Rotation3 Slerp(const Rotation3& to, double t) const;

  Rotation3 operator*(const Rotation3& other) const;
  bool operator==(const Rotation3& other) const;
  bool IsApprox(const Rotation3& other, double tol) const;

 private:
  Rotation3(const Eigen::Quaterniond& q, bool /*already_unit*/) : q_(q) {}
  Eigen::Quaterniond q_;
};

// Angle of a^T b in [0, pi].
double GeodesicDistance(const Rotation3& a, const Rotation3& b);

// Angle between two nonzero direction vectors, in [0, pi].
double AngleBetween(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Rotation angle of a rotation matrix via the trace, clamped to [-1, 1].
double TraceAngle(const Eigen::Matrix3d& r);

}  // namespace dexxfer

#endif  // DEXXFER_GEOM_ROTATION_H_
