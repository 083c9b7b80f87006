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

#include "dexxfer/retarget/retargeter.h"

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dexxfer/common/errors.h"

namespace dexxfer {
namespace {

// Largest per-joint change in one iteration (rad or m).
constexpr double kMaxStep = 0.5;

// Rotation vector taking `from` to `to`; its norm is the angle between them.
Eigen::Vector3d DirectionRotationVector(const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  const Eigen::Vector3d c = from.cross(to);
  const double s = c.norm();
  const double angle = std::atan2(s, from.dot(to));
  const double factor = s > 1e-9 ? angle / s : 1.0 + s * s / 6.0;
  return factor * c;
}

class Problem {
 public:
  Problem(const HandModel& model, const HumanFrame& h, const Eigen::VectorXd& q_prev,
          const RetargetWeights& w)
      : model_(model), q_prev_(q_prev), w_(w) {
    for (const auto& [finger, tip] : model.correspondence()) {
      tips_.push_back(tip);
      targets_.push_back(HumanFingertip(h, finger));
    }
    palm_ = HumanPalmOrientation(h);
    const double n = palm_.norm();
    use_palm_ = n > 1e-12 && w.orientation > 0.0;
    if (use_palm_) palm_ /= n;
  }

  int rows() const { return 3 * static_cast<int>(tips_.size()) + (use_palm_ ? 3 : 0) + model_.dof(); }

  Eigen::VectorXd Residual(const Eigen::VectorXd& q, const HandKinematics& kin) const {
    Eigen::VectorXd r(rows());
    const double sf = std::sqrt(w_.fingertip);
    int row = 0;
    for (size_t i = 0; i < tips_.size(); ++i, row += 3) {
      r.segment<3>(row) = sf * (kin.fingertips.row(tips_[i]).transpose() - targets_[i]);
    }
    if (use_palm_) {
      r.segment<3>(row) = std::sqrt(w_.orientation) *
                          DirectionRotationVector(palm_, model_.PalmOrientation(kin));
      row += 3;
    }
    r.segment(row, model_.dof()) = std::sqrt(w_.smoothness) * (q - q_prev_);
    return r;
  }

  Eigen::MatrixXd Jacobian(const HandKinematics& kin) const {
    const int d = model_.dof();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows(), d);
    const double sf = std::sqrt(w_.fingertip);
    int row = 0;
    for (size_t i = 0; i < tips_.size(); ++i, row += 3) {
      const Site& site = model_.fingertips()[tips_[i]];
      jac.middleRows(row, 3) = sf * model_.PointJacobian(kin, site.link, kin.fingertips.row(tips_[i]).transpose());
    }
    if (use_palm_) {
      // Palm normal n = s * c / |c| with c = (ring - index) x (wrist - index).
      const auto& sites = model_.palm_sites();
      Eigen::Matrix3Xd js[3];
      for (int i = 0; i < 3; ++i) js[i] = model_.PointJacobian(kin, sites[i].link, kin.palm_sites[i]);
      const Eigen::Vector3d e1 = kin.palm_sites[1] - kin.palm_sites[0];
      const Eigen::Vector3d e2 = kin.palm_sites[2] - kin.palm_sites[0];
      const Eigen::Vector3d c = e1.cross(e2);
      const double cn = c.norm();
      const Eigen::Vector3d n = c / cn;
      Eigen::Matrix3Xd dc(3, d);
      for (int k = 0; k < d; ++k) {
        const Eigen::Vector3d de1 = js[1].col(k) - js[0].col(k);
        const Eigen::Vector3d de2 = js[2].col(k) - js[0].col(k);
        dc.col(k) = de1.cross(e2) + e1.cross(de2);
      }
      const Eigen::Matrix3Xd dn = model_.palm_normal_sign() *
                                  (Eigen::Matrix3d::Identity() - n * n.transpose()) * dc / cn;
      // d(rotation vector)/dn by central differences in n.
      const Eigen::Vector3d ns = model_.palm_normal_sign() * n;
      Eigen::Matrix3d drdn;
      const double h = 1e-7;
      for (int a = 0; a < 3; ++a) {
        Eigen::Vector3d np = ns, nm = ns;
        np[a] += h;
        nm[a] -= h;
        drdn.col(a) = (DirectionRotationVector(palm_, np) - DirectionRotationVector(palm_, nm)) / (2 * h);
      }
      jac.middleRows(row, 3) = std::sqrt(w_.orientation) * drdn * dn;
      row += 3;
    }
    jac.block(row, 0, d, d) = std::sqrt(w_.smoothness) * Eigen::MatrixXd::Identity(d, d);
    return jac;
  }

  double Objective(const Eigen::VectorXd& q) const {
    return Residual(q, model_.ForwardKinematics(q)).squaredNorm();
  }

 private:
  const HandModel& model_;
  Eigen::VectorXd q_prev_;
  RetargetWeights w_;
  std::vector<int> tips_;
  std::vector<Eigen::Vector3d> targets_;
  Eigen::Vector3d palm_;
  bool use_palm_ = false;
};

// Projected gradient: components pinned at a bound with the descent direction
// pointing outward do not count.
double ProjectedGradientNorm(const Eigen::VectorXd& g, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if ((q[i] <= lo[i] && g[i] > 0.0) || (q[i] >= hi[i] && g[i] < 0.0)) continue;
    s += g[i] * g[i];
  }
  return std::sqrt(s);
}

}  // namespace

double RetargetObjective(const HandModel& model, const HumanFrame& h, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& q_prev, const RetargetWeights& w) {
  return Problem(model, h, q_prev, w).Objective(q);
}

RetargetResult RetargetFrame(const HandModel& model, const HumanFrame& h,
                             const Eigen::VectorXd& q_prev, const RetargetWeights& w,
                             const RetargetOptions& options) {
  if (q_prev.size() != model.dof()) {
    throw DimensionError("q_prev has " + std::to_string(q_prev.size()) + " entries, expected " +
                         std::to_string(model.dof()));
  }
  if (!(w.fingertip > 0.0) || w.orientation < 0.0 || w.smoothness < 0.0) {
    throw ConfigError("retarget weights must satisfy w_f > 0, w_o >= 0, w_s >= 0");
  }
  const Problem problem(model, h, q_prev, w);
  const Eigen::VectorXd lo = model.lower_limits();
  const Eigen::VectorXd hi = model.upper_limits();

  RetargetResult res;
  res.q = model.Clamp(q_prev);
  HandKinematics kin = model.ForwardKinematics(res.q);
  Eigen::VectorXd r = problem.Residual(res.q, kin);
  res.objective = r.squaredNorm();
  double lambda = 1e-3;
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    const Eigen::MatrixXd jac = problem.Jacobian(kin);
    const Eigen::VectorXd g = 2.0 * jac.transpose() * r;
    if (ProjectedGradientNorm(g, res.q, lo, hi) < options.gradient_tolerance) {
      res.converged = true;
      break;
    }
    // Joints pinned at a limit with the descent direction pointing outward
    // stay fixed; the damped system is solved over the rest.
    std::vector<int> free;
    for (int i = 0; i < res.q.size(); ++i) {
      const bool at_lo = res.q[i] <= lo[i] && g[i] > 0.0;
      const bool at_hi = res.q[i] >= hi[i] && g[i] < 0.0;
      if (!at_lo && !at_hi) free.push_back(i);
    }
    const int nf = static_cast<int>(free.size());
    Eigen::MatrixXd jf(jac.rows(), nf);
    Eigen::VectorXd gf(nf);
    for (int k = 0; k < nf; ++k) {
      jf.col(k) = jac.col(free[k]);
      gf[k] = g[free[k]];
    }
    const Eigen::MatrixXd jtj = jf.transpose() * jf;
    const Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);
    bool accepted = false;
    for (int attempt = 0; attempt < 24 && !accepted; ++attempt) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      Eigen::VectorXd step_f = a.ldlt().solve(-0.5 * gf);
      const double longest = step_f.cwiseAbs().maxCoeff();
      if (longest > kMaxStep) step_f *= kMaxStep / longest;
      Eigen::VectorXd step = Eigen::VectorXd::Zero(res.q.size());
      for (int k = 0; k < nf; ++k) step[free[k]] = step_f[k];
      const Eigen::VectorXd q_new = (res.q + step).cwiseMax(lo).cwiseMin(hi);
      HandKinematics kin_new = model.ForwardKinematics(q_new);
      Eigen::VectorXd r_new = problem.Residual(q_new, kin_new);
      const double f_new = r_new.squaredNorm();
      if (f_new < res.objective) {
        res.q = q_new;
        kin = std::move(kin_new);
        r = std::move(r_new);
        res.objective = f_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) {
      // No descent available at working precision: a stationary point.
      res.converged = true;
      break;
    }
  }
  return res;
}

Eigen::VectorXd InitialGuess(const HandModel& model, const HumanFrame& h) {
  Eigen::VectorXd q = model.MidRange();
  if (!model.floating_base() || model.correspondence().size() < 2) return q;
  q.head<kFloatingBaseDofs>().setZero();
  const HandKinematics kin = model.ForwardKinematics(q);
  std::vector<Eigen::Vector3d> robot, human;
  for (const auto& [finger, tip] : model.correspondence()) {
    robot.push_back(kin.fingertips.row(tip).transpose());
    human.push_back(HumanFingertip(h, finger));
  }
  Eigen::Vector3d rc = Eigen::Vector3d::Zero(), hc = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < robot.size(); ++i) {
    rc += robot[i];
    hc += human[i];
  }
  rc /= robot.size();
  hc /= human.size();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double spread = 0.0;
  for (size_t i = 0; i < robot.size(); ++i) {
    cov += (robot[i] - rc) * (human[i] - hc).transpose();
    spread += (robot[i] - rc).squaredNorm();
  }
  const Eigen::Vector3d palm_h = HumanPalmOrientation(h);
  if (palm_h.norm() > 1e-12) {
    cov += spread * model.PalmOrientation(kin) * palm_h.normalized().transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  fix(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Eigen::Matrix3d rot = svd.matrixV() * fix * svd.matrixU().transpose();
  Pose6 wrist;
  wrist.orientation = Rotation3::FromMatrix(rot);
  wrist.position = hc - rot * rc;
  const Eigen::Matrix<double, 6, 1> hint = Eigen::Matrix<double, 6, 1>::Zero();
  q.head<kFloatingBaseDofs>() = model.WristJointsFromPose(wrist, hint);
  return model.Clamp(q);
}

bool RetargetedSequence::all_converged() const {
  for (bool c : converged) {
    if (!c) return false;
  }
  return true;
}

RetargetedSequence RetargetSequence(const HandModel& model, const std::vector<HumanFrame>& frames,
                                    const RetargetWeights& w, const RetargetOptions& options) {
  if (frames.size() < 2) throw ConfigError("retargeting needs at least 2 frames");
  RetargetedSequence out;
  out.q.resize(static_cast<Eigen::Index>(frames.size()), model.dof());
  Eigen::VectorXd prev = options.align_first_frame ? InitialGuess(model, frames[0]) : model.MidRange();
  for (size_t t = 0; t < frames.size(); ++t) {
    RetargetWeights wt = w;
    if (t == 0) wt.smoothness = 0.0;
    RetargetResult r = RetargetFrame(model, frames[t], prev, wt, options);
    out.q.row(static_cast<Eigen::Index>(t)) = r.q.transpose();
    out.converged.push_back(r.converged);
    out.iterations.push_back(r.iterations);
    prev = r.q;
  }
  return out;
}

std::vector<HumanFrame> HumanTrajectory(const DemoSequence& demo) {
  std::vector<HumanFrame> out;
  out.reserve(demo.frames.size());
  for (const DemoFrame& f : demo.frames) out.push_back(f.hand);
  return out;
}

HumanFrame HumanFrameFromRobot(const HandModel& model, const Eigen::VectorXd& q) {
  const HandKinematics kin = model.ForwardKinematics(q);
  HumanFrame h = HumanFrame::Zero();
  for (int f = 0; f < kHumanFingers; ++f) h.segment<3>(3 * f) = kin.fingertips.row(0).transpose();
  for (const auto& [finger, tip] : model.correspondence()) {
    h.segment<3>(3 * finger) = kin.fingertips.row(tip).transpose();
  }
  h.tail<3>() = model.PalmOrientation(kin);
  return h;
}

}  // namespace dexxfer
