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

#include "dexxfer/common/json_util.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dexxfer/common/errors.h"

namespace dexxfer {

Json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& j,
                   int indent) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(indent) << "\n";
}

const Json& RequireField(const Json& j, const std::string& key,
                         const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where, "missing field '" + key + "'");
  }
  return j.at(key);
}

double RequireFiniteNumber(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where, "non-finite value");
  return v;
}

Eigen::VectorXd ParseVector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    // JSON has no NaN literal; null is how NaN round-trips through dump().
    if (j[i].is_null()) throw ParseError(where, "non-finite value");
    v[i] = RequireFiniteNumber(j[i], where);
  }
  return v;
}

Eigen::Vector3d ParseVec3(const Json& j, const std::string& where) {
  Eigen::VectorXd v = ParseVector(j, where);
  if (v.size() != 3) {
    throw ParseError(where, "expected 3 values, got " + std::to_string(v.size()));
  }
  return v;
}

Json ToJson(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json ToJson(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json ToJson(const Eigen::MatrixXd& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Eigen::VectorXd row = m.row(r).transpose();
    j.push_back(ToJson(row));
  }
  return j;
}

Eigen::MatrixXd ParseMatrix(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where, "expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(0, 0);
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    Eigen::VectorXd row = ParseVector(j[r], where + "[" + std::to_string(r) + "]");
    if (static_cast<size_t>(row.size()) != cols) {
      throw ParseError(where, "ragged matrix at row " + std::to_string(r));
    }
    m.row(r) = row.transpose();
  }
  return m;
}

Json PoseToJson(const Pose6& p) {
  const Eigen::Quaterniond& q = p.orientation.quaternion();
  return Json{{"pos", ToJson(p.position)},
              {"quat", Json::array({q.w(), q.x(), q.y(), q.z()})}};
}

Pose6 PoseFromJson(const Json& j, const std::string& where) {
  Pose6 p;
  p.position = ParseVec3(RequireField(j, "pos", where), where + ".pos");
  Eigen::VectorXd q = ParseVector(RequireField(j, "quat", where), where + ".quat");
  if (q.size() != 4) throw ParseError(where + ".quat", "expected 4 values");
  if (q.norm() < 1e-12) throw ParseError(where + ".quat", "zero quaternion");
  p.orientation = Rotation3::FromWxyz(q[0], q[1], q[2], q[3]);
  return p;
}

}  // namespace dexxfer
