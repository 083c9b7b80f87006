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

#ifndef DEXXFER_COMMON_JSON_UTIL_H_
#define DEXXFER_COMMON_JSON_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "dexxfer/geom/pose.h"

namespace dexxfer {

using Json = nlohmann::json;

Json ReadJsonFile(const std::filesystem::path& path);
// Writes with a trailing newline; the dump is deterministic for equal input.
void WriteJsonFile(const std::filesystem::path& path, const Json& j,
                   int indent = 1);

// Field accessors that raise ParseError naming `where` on failure.
const Json& RequireField(const Json& j, const std::string& key,
                         const std::string& where);
double RequireFiniteNumber(const Json& j, const std::string& where);
Eigen::Vector3d ParseVec3(const Json& j, const std::string& where);
Eigen::VectorXd ParseVector(const Json& j, const std::string& where);

Json ToJson(const Eigen::Vector3d& v);
Json ToJson(const Eigen::VectorXd& v);
Json ToJson(const Eigen::MatrixXd& m);  // row-major nested arrays
Eigen::MatrixXd ParseMatrix(const Json& j, const std::string& where);

// {"pos":[3], "quat":[w,x,y,z]}
Json PoseToJson(const Pose6& p);
Pose6 PoseFromJson(const Json& j, const std::string& where);

}  // namespace dexxfer

#endif  // DEXXFER_COMMON_JSON_UTIL_H_
