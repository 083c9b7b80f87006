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

#include "dexxfer/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <utility>

#include "dexxfer/common/errors.h"

namespace dexxfer {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

}  // namespace

int ClassifyWindow(const Pose6& first, const Pose6& last, const SemanticOptions& options) {
  const Eigen::Vector3d delta = last.position - first.position;
  const double vertical = std::abs(delta.z());
  const double horizontal = delta.head<2>().norm();
  if (vertical >= options.translation && vertical >= horizontal) {
    return delta.z() > 0.0 ? kLift : kFall;
  }
  if (horizontal >= options.translation) return kTranslation;

  const Rotation3 rel = last.orientation * first.orientation.Inverse();
  const Eigen::Vector3d z = Eigen::Vector3d::UnitZ();
  const double tilt = AngleBetween(rel.Rotate(z), z) * kDeg;
  if (tilt >= options.tilt_deg) return kTilt;
  // Twist about world z.
  const Eigen::Quaterniond q = rel.quaternion();
  double twist = 2.0 * std::atan2(std::abs(q.z()), std::abs(q.w()));
  if (twist * kDeg >= options.rotation_deg) return kRotation;
  return kMotionless;
}

std::vector<int> WindowLabels(const std::vector<Pose6>& trajectory, const SemanticOptions& options) {
  if (options.window < 2 || options.step < 1) throw ConfigError("semantic window must be >= 2 and step >= 1");
  if (static_cast<int>(trajectory.size()) < options.window) {
    throw ConfigError("trajectory of " + std::to_string(trajectory.size()) +
                      " frames is shorter than the semantic window (" + std::to_string(options.window) + ")");
  }
  std::vector<int> labels;
  for (size_t s = 0; s + options.window <= trajectory.size(); s += options.step) {
    labels.push_back(ClassifyWindow(trajectory[s], trajectory[s + options.window - 1], options));
  }
  return labels;
}

std::vector<int> EncodeSemantics(const std::vector<Pose6>& trajectory, const SemanticOptions& options) {
  std::vector<int> out;
  for (int l : WindowLabels(trajectory, options)) {
    if (l == kMotionless) continue;
    if (out.empty() || out.back() != l) out.push_back(l);
  }
  return out;
}

DtwResult Dtw(const std::vector<int>& a, const std::vector<int>& b, DtwNormalization normalization) {
  DtwResult r;
  const size_t n = a.size();
  const size_t m = b.size();
  if (n == 0 || m == 0) throw ConfigError("DTW needs two non-empty sequences");
  // (cost, length), compared lexicographically.
  using Cell = std::pair<int, int>;
  const Cell inf{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  std::vector<Cell> dp((n + 1) * (m + 1), inf);
  auto at = [&](size_t i, size_t j) -> Cell& { return dp[i * (m + 1) + j]; };
  at(0, 0) = {0, 0};
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const Cell best = std::min({at(i - 1, j), at(i, j - 1), at(i - 1, j - 1)});
      at(i, j) = {best.first + (a[i - 1] != b[j - 1] ? 1 : 0), best.second + 1};
    }
  }
  r.cost = at(n, m).first;
  r.path_length = at(n, m).second;
  const double denom =
      normalization == DtwNormalization::kPathLength ? r.path_length : static_cast<double>(std::max(n, m));
  r.distance = r.cost / denom;
  return r;
}

TsrResult Tsr(const std::vector<int>& human, const std::vector<int>& robot, DtwNormalization normalization) {
  TsrResult r;
  if (human.empty() && robot.empty()) {
    r.distance = 0.0;
  } else if (human.empty() || robot.empty()) {
    r.distance = 1.0;
  } else {
    r.distance = Dtw(human, robot, normalization).distance;
  }
  r.success = r.distance < kTsrThreshold;
  return r;
}

PoseErrors EpEr(const std::vector<Pose6>& reference, const std::vector<Pose6>& executed) {
  if (reference.empty() || executed.empty()) throw DimensionError("pose error needs non-empty trajectories");
  const size_t n = reference.size();
  const size_t m = executed.size();
  PoseErrors e;
  for (size_t i = 0; i < n; ++i) {
    const size_t j = n == 1 ? 0 : static_cast<size_t>(std::llround(static_cast<double>(i) * (m - 1) / (n - 1)));
    if (j >= m) throw DimensionError("resampled index out of range");
    e.ep += (reference[i].position - executed[j].position).norm();
    e.er += GeodesicDistance(reference[i].orientation, executed[j].orientation) * kDeg;
  }
  e.ep /= n;
  e.er /= n;
  return e;
}

bool SrGrasp(double final_distance, int hold_steps, int required_hold_steps, double tolerance) {
  return final_distance <= tolerance && hold_steps >= required_hold_steps;
}

bool SrFollow(bool dropped) { return !dropped; }

Json MetricReport::ToJson() const {
  return Json{{"sr_grasp", sr_grasp},
              {"sr_follow", sr_follow},
              {"ep", ep},
              {"er", er},
              {"tsr", tsr},
              {"dtw_distance", dtw_distance},
              {"human_semantics", human_semantics},
              {"robot_semantics", robot_semantics}};
}

MetricReport MetricReport::FromJson(const Json& j) {
  MetricReport r;
  r.sr_grasp = RequireField(j, "sr_grasp", "metrics").get<bool>();
  r.sr_follow = RequireField(j, "sr_follow", "metrics").get<bool>();
  r.ep = RequireFiniteNumber(RequireField(j, "ep", "metrics"), "metrics.ep");
  r.er = RequireFiniteNumber(RequireField(j, "er", "metrics"), "metrics.er");
  r.tsr = RequireField(j, "tsr", "metrics").get<bool>();
  r.dtw_distance = RequireFiniteNumber(RequireField(j, "dtw_distance", "metrics"), "metrics.dtw_distance");
  r.human_semantics = j.value("human_semantics", std::vector<int>{});
  r.robot_semantics = j.value("robot_semantics", std::vector<int>{});
  return r;
}

std::string MetricReport::Table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-9s %-10s %-9s %-9s %-4s\n%-9s %-10s %-9.4f %-9.3f %-4s\n", "SR Grasp",
                "SR Follow", "Ep (m)", "Er (deg)", "TSR", sr_grasp ? "yes" : "no", sr_follow ? "yes" : "no", ep, er,
                tsr ? "yes" : "no");
  return buf;
}

Json CorpusSummary::ToJson() const {
  return Json{{"tasks", tasks}, {"sr_grasp", sr_grasp}, {"sr_follow", sr_follow},
              {"ep", ep},       {"er", er},             {"tsr", tsr}};
}

std::string CorpusSummary::Table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-6s %-9s %-10s %-9s %-9s %-6s\n%-6d %-9.1f %-10.1f %-9.4f %-9.3f %-6.1f\n",
                "Tasks", "SR Grasp", "SR Follow", "Ep (m)", "Er (deg)", "TSR", tasks, 100.0 * sr_grasp,
                100.0 * sr_follow, ep, er, 100.0 * tsr);
  return buf;
}

CorpusSummary Summarize(const std::vector<MetricReport>& reports) {
  CorpusSummary s;
  s.tasks = static_cast<int>(reports.size());
  if (reports.empty()) return s;
  for (const MetricReport& r : reports) {
    s.sr_grasp += r.sr_grasp;
    s.sr_follow += r.sr_follow;
    s.ep += r.ep;
    s.er += r.er;
    s.tsr += r.tsr;
  }
  const double n = static_cast<double>(reports.size());
  s.sr_grasp /= n;
  s.sr_follow /= n;
  s.ep /= n;
  s.er /= n;
  s.tsr /= n;
  return s;
}

}  // namespace dexxfer
