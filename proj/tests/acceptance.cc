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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Oracles are independent of the library code they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dexxfer/common/errors.h"
#include "dexxfer/contact/action.h"
#include "dexxfer/contact/reward.h"
#include "dexxfer/demo/demo.h"
#include "dexxfer/eval/metrics.h"
#include "dexxfer/geom/pose.h"
#include "dexxfer/geom/rotation.h"
#include "dexxfer/hand/hand_model.h"
#include "dexxfer/pipeline/config.h"
#include "dexxfer/pipeline/pipeline.h"
#include "dexxfer/retarget/retargeter.h"
#include "dexxfer/retarget/spline.h"
#include "dexxfer/wrist/planner.h"

namespace dexxfer {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

fs::path DataPath(const std::string& rel) { return fs::path(DEXXFER_DATA_DIR) / rel; }

double Seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Rotation3 RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Rotation3(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)));
}

// ---- 1: reward

struct RewardCase {
  std::vector<double> contact;
  std::vector<double> distal;
  int thumb;
  Eigen::VectorXd q, q_target;
  double h, ori, pos;
  std::optional<double> d_closest;
};

// Straight transcription of the reward definition, written without the
// library's helpers.
double ExpectedReward(const RewardCase& c) {
  double sum = 0.0;
  for (double d : c.contact) sum += d;
  const double closest = c.d_closest.value_or(sum);
  const double approach = closest - sum > 0.0 ? closest - sum : 0.0;
  int ce = 1;
  for (double d : c.contact) {
    if (!(d <= 0.06)) ce = 0;
  }
  int con = 0, thumb = 0, others = 0;
  for (size_t i = 0; i < c.distal.size(); ++i) {
    const int in = c.distal[i] <= 0.002 ? 1 : 0;
    con += in;
    if (static_cast<int>(i) == c.thumb) {
      thumb = in;
    } else {
      others += in;
    }
  }
  const int ht = (thumb == 1 && others >= 1) ? 1 : 0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < c.q.size(); ++i) {
    dot += c.q[i] * c.q_target[i];
    na += c.q[i] * c.q[i];
    nb += c.q_target[i] * c.q_target[i];
  }
  const double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  const double grasp = 0.5 * con + 0.5 * sim;
  double lift;
  if (c.h <= 0.02) {
    lift = 100.0 * c.h < 2.0 ? 100.0 * c.h : 2.0;
  } else {
    const double a = 10.0 * c.ori < 5.0 ? 10.0 * c.ori : 5.0;
    const double b = 50.0 * c.pos < 5.0 ? 50.0 * c.pos : 5.0;
    lift = 15.0 - a - b;
  }
  return 10.0 * approach + ce * 10.0 * grasp + ht * 20.0 * lift;
}

Outcome CheckReward() {
  const auto t0 = Clock::now();
  const Eigen::Vector3d q(0.3, -0.2, 0.8), qt(0.25, -0.1, 0.9);
  std::vector<RewardCase> cases{
      // h at the branch boundary and either side of it
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.02, 0.1, 0.01, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.0200001, 0.1, 0.01, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.0199999, 0.1, 0.01, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.0, 0.1, 0.01, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.01, 0.0, 0.0, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.05, 0.0, 0.0, std::nullopt},
      {{0.01, 0.01, 0.01}, {0.0, 0.001, 0.01}, 0, q, qt, 0.05, 0.6, 0.2, std::nullopt},
      // fingertip distances at and around epsilon
      {{0.06, 0.06, 0.06}, {0.0, 0.001, 0.01}, 0, q, qt, 0.03, 0.2, 0.05, 0.5},
      {{0.06, 0.0600001, 0.02}, {0.0, 0.001, 0.01}, 0, q, qt, 0.03, 0.2, 0.05, 0.5},
      {{0.05, 0.06, 0.04}, {0.0, 0.001, 0.01}, 0, q, qt, 0.03, 0.2, 0.05, 0.5},
      {{0.05, 0.06, 0.04, 0.07}, {0.0, 0.001, 0.01, 0.0}, 0, q, qt, 0.03, 0.2, 0.05, 0.5},
      // distal distances at and around phi
      {{0.02, 0.02, 0.02}, {0.002, 0.002, 0.1}, 0, q, qt, 0.03, 0.2, 0.05, 0.2},
      {{0.02, 0.02, 0.02}, {0.002, 0.0020001, 0.1}, 0, q, qt, 0.03, 0.2, 0.05, 0.2},
      {{0.02, 0.02, 0.02}, {0.0020001, 0.0, 0.0}, 0, q, qt, 0.03, 0.2, 0.05, 0.2},
      {{0.02, 0.02, 0.02}, {0.001, 0.05, 0.05}, 0, q, qt, 0.03, 0.2, 0.05, 0.2},
      {{0.02, 0.02, 0.02}, {0.001, 0.05, 0.05}, 2, q, qt, 0.03, 0.2, 0.05, 0.2},
      // approach: progress, no progress, first step
      {{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}, 0, q, qt, 0.0, 0.0, 0.0, 0.45},
      {{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}, 0, q, qt, 0.0, 0.0, 0.0, 0.2},
      {{0.1, 0.1, 0.1}, {0.1, 0.1, 0.1}, 0, q, qt, 0.0, 0.0, 0.0, std::nullopt},
      // full composite: every gate open
      {{0.03, 0.02, 0.04}, {0.0, 0.0015, 0.0}, 1, q, qt, 0.08, 0.05, 0.01, 0.3},
      {{0.03, 0.02, 0.04}, {0.0, 0.0015, 0.0}, 1, q, q, 0.08, 0.0, 0.0, 0.3},
      {{0.03, 0.02, 0.04}, {0.0, 0.0015, 0.0}, 1, q, -q, 0.015, 0.9, 0.3, 0.09},
  };
  double worst = 0.0;
  int composite_open = 0;
  for (const RewardCase& c : cases) {
    RewardInput in;
    in.contact_distances = c.contact;
    in.distal_distances = c.distal;
    in.thumb = c.thumb;
    in.q = c.q;
    in.q_target = c.q_target;
    in.lift_height = c.h;
    in.orientation_error = c.ori;
    in.position_error = c.pos;
    const RewardResult r = ComputeReward(in, RewardConstants{}, c.d_closest);
    worst = std::max(worst, std::abs(r.terms.total - ExpectedReward(c)));
    composite_open += (r.terms.close_enough && r.terms.touched && r.terms.approach > 0.0) ? 1 : 0;
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-9 && cases.size() >= 20 && composite_open >= 1 && secs < 1.0,
          Format("%zu states, max |diff| %.3g, %.3f s", cases.size(), worst, secs)};
}

// ---- 2: retargeting round trip

Outcome CheckRetarget() {
  std::string detail;
  bool pass = true;
  for (const char* name : {"toy3", "allegro16", "leap16", "adroit24"}) {
    const HandModel m = HandModel::Load(DataPath(std::string("hands/") + name + ".json"));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> residuals;
    double max_ms = 0.0, total_ms = 0.0;
    for (int n = 0; n < 100; ++n) {
      Eigen::VectorXd q(m.dof());
      for (int i = 0; i < m.dof(); ++i) {
        const Joint& j = m.joints()[i];
        q[i] = j.lower + u(rng) * (j.upper - j.lower);
      }
      if (m.floating_base()) {
        for (int i = 0; i < 3; ++i) q[i] = 0.2 * (u(rng) - 0.5);
      }
      const HumanFrame h = HumanFrameFromRobot(m, q);
      const auto t0 = Clock::now();
      const RetargetResult r = RetargetFrame(m, h, InitialGuess(m, h), RetargetWeights{1.0, 1.0, 0.0});
      const double ms = 1e3 * Seconds(t0);
      max_ms = std::max(max_ms, ms);
      total_ms += ms;
      const Eigen::MatrixX3d want = m.ForwardKinematics(q).fingertips;
      const Eigen::MatrixX3d got = m.ForwardKinematics(r.q).fingertips;
      for (const auto& [finger, tip] : m.correspondence()) {
        residuals.push_back((want.row(tip) - got.row(tip)).norm());
      }
    }
    std::sort(residuals.begin(), residuals.end());
    double mean = 0.0;
    for (double r : residuals) mean += r;
    mean /= residuals.size();
    const double p95 = residuals[static_cast<size_t>(std::ceil(0.95 * residuals.size())) - 1];
    const bool ok = mean < 2e-3 && p95 < 5e-3 && max_ms < 100.0;
    pass = pass && ok;
    detail += Format("%s mean %.2f mm p95 %.2f mm solve avg %.1f max %.1f ms; ", name, 1e3 * mean, 1e3 * p95,
                     total_ms / 100, max_ms);
  }
  return {pass, detail};
}

// ---- 3: geodesic and DTW oracles

std::pair<int, int> BruteDtw(const std::vector<int>& a, const std::vector<int>& b) {
  std::pair<int, int> best{std::numeric_limits<int>::max(), 0};
  std::function<void(size_t, size_t, int, int)> walk = [&](size_t i, size_t j, int cost, int len) {
    cost += a[i] != b[j];
    ++len;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, std::make_pair(cost, len));
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, cost, len);
    if (j + 1 < b.size()) walk(i, j + 1, cost, len);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, cost, len);
  };
  walk(0, 0, 0, 0);
  return best;
}

Outcome CheckOracles() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const Rotation3 a = RandomRotation(rng), b = RandomRotation(rng);
    const Eigen::Matrix3d rel = a.matrix().transpose() * b.matrix();
    const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
    worst = std::max(worst, std::abs(GeodesicDistance(a, b) - std::acos(c)));
  }
  std::uniform_int_distribution<int> label(1, 5), len(1, 6);
  int mismatches = 0;
  for (int n = 0; n < 50; ++n) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (int& x : a) x = label(rng);
    for (int& x : b) x = label(rng);
    const auto [cost, length] = BruteDtw(a, b);
    const DtwResult r = Dtw(a, b);
    if (r.cost != cost || r.path_length != length || r.distance != static_cast<double>(cost) / length) ++mismatches;
  }
  return {worst <= 1e-9 && mismatches == 0,
          Format("geodesic max |diff| %.3g over 1000 pairs; DTW mismatches %d of 50", worst, mismatches)};
}

// ---- 4: wrist planner invariance

Outcome CheckWristPlanner() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  bool identity = true;
  for (int k = 0; k < 20; ++k) {
    // Smooth random object path: drifting position, rotation about a random axis.
    std::vector<Pose6> objects;
    const Eigen::Vector3d p0(n(rng) * 0.2, n(rng) * 0.2, 0.1 + std::abs(n(rng)) * 0.1);
    const Eigen::Vector3d v(n(rng) * 0.1, n(rng) * 0.1, n(rng) * 0.1);
    const Eigen::Vector3d axis = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    const Rotation3 r0 = RandomRotation(rng);
    for (int t = 0; t < 120; ++t) {
      Pose6 o;
      o.position = p0 + v * (t / 120.0);
      o.orientation = Rotation3::FromAxisAngle(axis, 1.5 * std::sin(t / 40.0)) * r0;
      objects.push_back(o);
    }
    Pose6 wrist;
    wrist.position = p0 + Eigen::Vector3d(n(rng), n(rng), n(rng)) * 0.1;
    wrist.orientation = RandomRotation(rng);
    const ManipulationPlan plan = PlanWrist(objects, wrist, Eigen::VectorXd::Zero(3));
    identity = identity && plan.wrist[0].position == wrist.position &&
               plan.wrist[0].orientation.quaternion().coeffs() == wrist.orientation.quaternion().coeffs();
    const Eigen::Matrix4d rel0 = (wrist.Matrix().inverse() * objects[0].Matrix());
    for (int t = 0; t < plan.length(); ++t) {
      const Eigen::Matrix4d rel = plan.wrist[t].Matrix().inverse() * objects[t].Matrix();
      worst = std::max(worst, (rel - rel0).cwiseAbs().maxCoeff());
    }
  }
  return {worst < 1e-9 && identity,
          Format("20 trajectories, max deviation %.3g, grasp-frame identity %s", worst, identity ? "exact" : "broken")};
}

// ---- 5: rescaling containment

Outcome CheckContainment() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int d = 22;
  Eigen::VectorXd q_pre(d), lo(d), hi(d), rho(6);
  for (int i = 0; i < d; ++i) {
    lo[i] = -1.0 - std::abs(u(rng));
    hi[i] = 1.0 + std::abs(u(rng));
    q_pre[i] = 0.5 * u(rng);
  }
  rho << 0.1, 0.1, 0.1, 0.3, 0.3, 0.3;
  const ActionScaler scaler(q_pre, rho, lo, hi);
  long violations = 0;
  double closest = 0.0;
  for (int n = 0; n < 100000; ++n) {
    Eigen::VectorXd primary(d), delta(d);
    for (int i = 0; i < d; ++i) {
      primary[i] = scaler.Rescale(Eigen::VectorXd::Constant(d, u(rng)))[i];
      delta[i] = 3.0 * u(rng);  // policy outputs well beyond the clamp
    }
    const Eigen::VectorXd target = scaler.Compose(primary, delta, 0.2);
    for (int i = 0; i < 6; ++i) {
      closest = std::max(closest, std::abs(target[i] - q_pre[i]) / rho[i]);
      if (target[i] < q_pre[i] - rho[i] || target[i] > q_pre[i] + rho[i]) ++violations;
    }
  }
  return {violations == 0, Format("1e5 actions, %ld violations, max |offset|/rho %.6f", violations, closest)};
}

// ---- 6: end-to-end toy transfer

bool GraspSucceeded(const TransferBundle& b) { return b.report.sr_grasp; }

Outcome CheckToyTransfer(const fs::path& work) {
  TransferConfig base = TransferConfig::Load(DataPath("configs/lift_box_toy3.json"));
  base.output_dir = work / "base";
  RunTransfer(base);  // stages up to configure are shared by every seed
  int rl = 0, baseline = 0;
  double max_train = 0.0;
  std::string seeds;
  for (int seed = 1; seed <= 20; ++seed) {
    for (bool no_rl : {false, true}) {
      const fs::path dir = work / Format("seed%02d%s", seed, no_rl ? "_nonrl" : "");
      fs::copy(base.output_dir, dir, fs::copy_options::recursive);
      TransferConfig c = base;
      c.output_dir = dir;
      c.seed = seed;
      c.no_rl = no_rl;
      const TransferBundle b = RunTransfer(c);
      if (no_rl) {
        baseline += GraspSucceeded(b);
      } else {
        rl += GraspSucceeded(b);
        max_train = std::max(max_train, b.manifest.stages.at("train").seconds);
        seeds += GraspSucceeded(b) ? "+" : "-";
      }
      fs::remove_all(dir);
    }
  }
  const bool pass = rl >= 14 && rl > baseline && max_train <= 1800.0;
  return {pass, Format("residual policy %d/20 (%s), no-RL baseline %d/20, max training %.1f s", rl, seeds.c_str(),
                       baseline, max_train)};
}

// ---- 7: TSR semantics

std::vector<Pose6> Trajectory(const std::vector<char>& phases) {
  // Each phase is 30 frames: 'l' lift 5 mm/frame, 'd' put down 5 mm/frame,
  // 't' tilt 2 deg/frame about x.
  std::vector<Pose6> out;
  double z = 0.05, angle = 0.0;
  out.push_back(Pose6{Eigen::Vector3d(0.3, 0.0, z), Rotation3()});
  for (char p : phases) {
    for (int i = 0; i < 30; ++i) {
      if (p == 'l') z += 0.005;
      if (p == 'd') z -= 0.005;
      if (p == 't') angle += 2.0 * kPi / 180.0;
      out.push_back(Pose6{Eigen::Vector3d(0.3, 0.0, z), Rotation3::FromAxisAngle(Eigen::Vector3d::UnitX(), angle)});
    }
  }
  return out;
}

Outcome CheckTsr() {
  const std::vector<int> ltd = EncodeSemantics(Trajectory({'l', 't', 'd'}));
  const std::vector<int> ldt = EncodeSemantics(Trajectory({'l', 'd', 't'}));
  const TsrResult same = Tsr(ltd, EncodeSemantics(Trajectory({'l', 't', 'd'})));
  const TsrResult swapped = Tsr(ltd, ldt);
  const double deg = kPi / 180.0;
  const Pose6 a{Eigen::Vector3d(0.0, 0.0, 0.1), Rotation3()};
  auto at = [](double x, double z, const Eigen::Vector3d& axis, double ang) {
    return Pose6{Eigen::Vector3d(x, 0.0, z), Rotation3::FromAxisAngle(axis, ang)};
  };
  const Eigen::Vector3d ex = Eigen::Vector3d::UnitX(), ez = Eigen::Vector3d::UnitZ();
  const std::vector<std::pair<Pose6, int>> fixtures{
      {at(0.0, 0.15, ez, 0.0), kLift},          {at(0.0, 0.05, ez, 0.0), kFall},
      {at(0.0, 0.12, ez, 0.0), kMotionless},    {at(0.04, 0.1, ez, 0.0), kTranslation},
      {at(0.02, 0.1, ez, 0.0), kMotionless},    {at(0.0, 0.1, ex, 16 * deg), kTilt},
      {at(0.0, 0.1, ex, 14 * deg), kMotionless}, {at(0.0, 0.1, ez, 10 * deg), kRotation},
      {at(0.0, 0.1, ez, 4 * deg), kMotionless},
  };
  int wrong = 0;
  for (const auto& [last, label] : fixtures) wrong += ClassifyWindow(a, last) != label;
  const bool ok = ltd == std::vector<int>{kLift, kTilt, kFall} && ldt == std::vector<int>{kLift, kFall, kTilt} &&
                  same.success && !swapped.success && wrong == 0;
  return {ok, Format("same order d=%.3f (%s), swapped d=%.3f (%s), window fixtures wrong %d of %zu", same.distance,
                     same.success ? "success" : "failure", swapped.distance, swapped.success ? "success" : "failure",
                     wrong, fixtures.size())};
}

// ---- 8: determinism

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome CheckDeterminism(const fs::path& work) {
  TransferConfig c = TransferConfig::Load(DataPath("configs/lift_box_toy3.json"));
  c.output_dir = work / "det_a";
  const TransferBundle a = RunTransfer(c);
  c.output_dir = work / "det_b";
  const TransferBundle b = RunTransfer(c);
  const std::string ma = ReadFile(work / "det_a" / "metrics.json");
  const bool same = !ma.empty() && ma == ReadFile(work / "det_b" / "metrics.json") &&
                    a.report.ToJson().dump() == b.report.ToJson().dump();
  return {same, Format("two fresh runs, metrics.json %s (%zu bytes)", same ? "identical" : "DIFFERENT", ma.size())};
}

// ---- 9: spline

Outcome CheckSpline() {
  const HandModel m = HandModel::Load(DataPath("hands/toy3.json"));
  const DemoSequence demo = LoadDemo(DataPath("demos/lift_box.json"));
  const Eigen::MatrixXd q = RetargetSequence(m, HumanTrajectory(demo), RetargetWeights{}).q;
  const SmoothTrajectory s = SmoothTrajectory::FitUniform(q, demo.fps);
  double knot_err = 0.0;
  for (int t = 0; t < q.rows(); ++t) {
    knot_err = std::max(knot_err, (s.Evaluate(t / demo.fps) - q.row(t).transpose()).cwiseAbs().maxCoeff());
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(s.start_time() + 1e-3, s.end_time() - 1e-3);
  const double h = 1e-5;
  double rel = 0.0;
  for (int n = 0; n < 500; ++n) {
    double t = u(rng);
    // Keep the stencil inside one segment: the third derivative jumps at
    // knots, which would bias a straddling difference by O(h).
    const double k = std::round(t * demo.fps) / demo.fps;
    if (std::abs(t - k) < 2 * h) t = k + (t < k ? -2 * h : 2 * h);
    for (int d = 1; d <= 2; ++d) {
      const Eigen::VectorXd fd = (s.Evaluate(t + h, d - 1) - s.Evaluate(t - h, d - 1)) / (2 * h);
      const Eigen::VectorXd an = s.Evaluate(t, d);
      for (int i = 0; i < an.size(); ++i) rel = std::max(rel, std::abs(an[i] - fd[i]) / std::max(1.0, std::abs(fd[i])));
    }
  }
  return {knot_err <= 1e-9 && rel < 1e-4,
          Format("%d knots x %d joints, knot error %.3g, derivative rel. error %.3g", static_cast<int>(q.rows()),
                 static_cast<int>(q.cols()), knot_err, rel)};
}

}  // namespace
}  // namespace dexxfer

int main() {
  using namespace dexxfer;
  const fs::path work = fs::temp_directory_path() / "dexxfer_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"reward exactness", CheckReward},
      {"retargeting round trip", CheckRetarget},
      {"geodesic and DTW oracles", CheckOracles},
      {"wrist planner invariance", CheckWristPlanner},
      {"rescaling containment", CheckContainment},
      {"end-to-end toy transfer", [&] { return CheckToyTransfer(work); }},
      {"TSR semantics", CheckTsr},
      {"determinism", [&] { return CheckDeterminism(work); }},
      {"spline and derivatives", CheckSpline},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), Seconds(t0));
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
