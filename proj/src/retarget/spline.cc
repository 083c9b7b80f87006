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

#include "dexxfer/retarget/spline.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dexxfer/common/errors.h"

namespace dexxfer {
namespace {

// Interior second derivatives for given end values (Thomas algorithm).
Eigen::VectorXd SolveSecond(const Eigen::VectorXd& h, const Eigen::VectorXd& y, double m0,
                            double mn) {
  const int n = static_cast<int>(y.size()) - 1;  // intervals
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n + 1);
  m[0] = m0;
  m[n] = mn;
  const int k = n - 1;  // unknowns 1..n-1
  if (k <= 0) return m;
  Eigen::VectorXd sub(k), diag(k), sup(k), rhs(k);
  for (int i = 1; i <= k; ++i) {
    sub[i - 1] = h[i - 1];
    diag[i - 1] = 2.0 * (h[i - 1] + h[i]);
    sup[i - 1] = h[i];
    rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
  }
  rhs[0] -= h[0] * m0;
  rhs[k - 1] -= h[n - 1] * mn;
  for (int i = 1; i < k; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  Eigen::VectorXd x(k);
  x[k - 1] = rhs[k - 1] / diag[k - 1];
  for (int i = k - 2; i >= 0; --i) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  m.segment(1, k) = x;
  return m;
}

double JerkOf(const Eigen::VectorXd& h, const Eigen::VectorXd& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    const double dm = m[i + 1] - m[i];
    s += dm * dm / h[i];
  }
  return s;
}

}  // namespace

SmoothTrajectory SmoothTrajectory::Fit(const Eigen::VectorXd& times, const Eigen::MatrixXd& values,
                                       SplineEnds ends) {
  const int n_knots = static_cast<int>(times.size());
  if (n_knots < 4) throw ConfigError("spline fit needs at least 4 knots");
  if (values.rows() != n_knots) throw DimensionError("knot times and values disagree in length");
  Eigen::VectorXd h(n_knots - 1);
  for (int i = 0; i + 1 < n_knots; ++i) {
    h[i] = times[i + 1] - times[i];
    if (!(h[i] > 0.0)) throw ConfigError("knot times must be strictly increasing");
  }
  SmoothTrajectory s;
  s.times_ = times;
  s.values_ = values;
  s.second_.resize(n_knots, values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    const Eigen::VectorXd y = values.col(j);
    Eigen::VectorXd m = SolveSecond(h, y, 0.0, 0.0);
    if (ends == SplineEnds::kMinimumJerk) {
      // Second derivatives are affine in the two end values:
      // m = base + m0 * u + mn * v. Minimize the jerk over (m0, mn).
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_knots);
      const Eigen::VectorXd u = SolveSecond(h, zero, 1.0, 0.0);
      const Eigen::VectorXd v = SolveSecond(h, zero, 0.0, 1.0);
      const int n = n_knots - 1;
      Eigen::MatrixXd a(n, 2);
      Eigen::VectorXd b(n);
      for (int i = 0; i < n; ++i) {
        const double w = 1.0 / std::sqrt(h[i]);
        a(i, 0) = w * (u[i + 1] - u[i]);
        a(i, 1) = w * (v[i + 1] - v[i]);
        b[i] = -w * (m[i + 1] - m[i]);
      }
      const Eigen::Vector2d ends_opt = a.colPivHouseholderQr().solve(b);
      m += ends_opt[0] * u + ends_opt[1] * v;
    }
    s.second_.col(j) = m;
  }
  return s;
}

SmoothTrajectory SmoothTrajectory::FitUniform(const Eigen::MatrixXd& values, double fps,
                                              SplineEnds ends) {
  if (!(fps > 0.0)) throw ConfigError("fps must be positive");
  Eigen::VectorXd t(values.rows());
  for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / fps;
  return Fit(t, values, ends);
}

Eigen::VectorXd SmoothTrajectory::Evaluate(double t, int derivative) const {
  const int n = knots() - 1;
  t = std::clamp(t, start_time(), end_time());
  int k = static_cast<int>(std::upper_bound(times_.data(), times_.data() + times_.size(), t) -
                           times_.data()) - 1;
  k = std::clamp(k, 0, n - 1);
  const double h = times_[k + 1] - times_[k];
  const double a = times_[k + 1] - t;  // distance to right knot
  const double b = t - times_[k];      // distance to left knot
  const auto mk = second_.row(k).transpose();
  const auto mk1 = second_.row(k + 1).transpose();
  const auto yk = values_.row(k).transpose();
  const auto yk1 = values_.row(k + 1).transpose();
  switch (derivative) {
    case 0:
      return mk * (a * a * a / (6 * h)) + mk1 * (b * b * b / (6 * h)) +
             (yk / h - mk * h / 6) * a + (yk1 / h - mk1 * h / 6) * b;
    case 1:
      return -mk * (a * a / (2 * h)) + mk1 * (b * b / (2 * h)) - (yk / h - mk * h / 6) +
             (yk1 / h - mk1 * h / 6);
    case 2:
      return mk * (a / h) + mk1 * (b / h);
    case 3:
      return (mk1 - mk) / h;
    default:
      throw ConfigError("derivative order must be 0..3");
  }
}

double SmoothTrajectory::JerkCost() const {
  Eigen::VectorXd h(knots() - 1);
  for (Eigen::Index i = 0; i < h.size(); ++i) h[i] = times_[i + 1] - times_[i];
  double total = 0.0;
  for (int j = 0; j < dof(); ++j) total += JerkOf(h, second_.col(j));
  return total;
}

Json SmoothTrajectory::ToJson() const {
  return Json{{"times", dexxfer::ToJson(times_)},
              {"values", dexxfer::ToJson(values_)},
              {"second_derivatives", dexxfer::ToJson(second_)}};
}

SmoothTrajectory SmoothTrajectory::FromJson(const Json& j) {
  SmoothTrajectory s;
  s.times_ = ParseVector(RequireField(j, "times", "spline"), "spline.times");
  s.values_ = ParseMatrix(RequireField(j, "values", "spline"), "spline.values");
  s.second_ = ParseMatrix(RequireField(j, "second_derivatives", "spline"), "spline.second_derivatives");
  if (s.values_.rows() != s.times_.size() || s.second_.rows() != s.times_.size() ||
      s.second_.cols() != s.values_.cols()) {
    throw ParseError("spline", "inconsistent knot arrays");
  }
  return s;
}

}  // namespace dexxfer
