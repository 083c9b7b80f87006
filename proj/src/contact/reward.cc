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

#include "dexxfer/contact/reward.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dexxfer/common/errors.h"

namespace dexxfer {

Json RewardTerms::ToJson() const {
  return Json{{"approach", approach}, {"ce", close_enough ? 1 : 0}, {"con", contact_count},
              {"sim", similarity},    {"grasp", grasp},             {"ht", touched ? 1 : 0},
              {"lift", lift},         {"total", total}};
}

double LiftReward(double h, double orientation_error, double position_error) {
  if (h <= 0.02) return std::min(2.0, 100.0 * h);
  return 15.0 - std::min(5.0, 10.0 * orientation_error) - std::min(5.0, 50.0 * position_error);
}

double CosineSimilarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("cosine similarity of vectors of different length");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return (na == 0.0 && nb == 0.0) ? 1.0 : 0.0;
  return a.dot(b) / (na * nb);
}

RewardResult ComputeReward(const RewardInput& in, const RewardConstants& c,
                           std::optional<double> d_closest) {
  RewardResult out;
  RewardTerms& r = out.terms;

  double sum = 0.0;
  bool all_close = !in.contact_distances.empty();
  for (double d : in.contact_distances) {
    sum += d;
    all_close = all_close && d <= c.epsilon;
  }
  double closest;
  if (d_closest) {
    closest = *d_closest;
  } else {
    closest = c.approach_from_first_step ? sum : -std::numeric_limits<double>::infinity();
  }
  r.approach = std::max(closest - sum, 0.0);
  out.d_closest = std::min(closest, sum);
  r.close_enough = all_close;

  int touching = 0;
  bool thumb = false;
  bool other = false;
  for (size_t i = 0; i < in.distal_distances.size(); ++i) {
    if (in.distal_distances[i] > c.phi) continue;
    ++touching;
    if (static_cast<int>(i) == in.thumb) {
      thumb = true;
    } else {
      other = true;
    }
  }
  r.contact_count = touching;
  r.similarity = CosineSimilarity(in.q, in.q_target);
  r.grasp = c.beta_con * r.contact_count + c.beta_sim * r.similarity;
  r.touched = thumb && other;
  r.lift = LiftReward(in.lift_height, in.orientation_error, in.position_error);

  r.total = c.alpha_approach * r.approach;
  if (r.close_enough) r.total += c.alpha_grasp * r.grasp;
  if (r.touched) r.total += c.alpha_lift * r.lift;
  return out;
}

}  // namespace dexxfer
