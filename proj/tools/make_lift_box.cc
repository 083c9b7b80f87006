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

// Writes the bundled lift-box demonstration: a hand descends onto a 5 cm
// cube, pinches it between the thumb and two fingers, lifts it 15 cm and
// holds. Fingertip keypoints are fingertip pad centers, so they sit a few
// millimeters outside the cube faces.

#include <algorithm>
#include <iostream>

#include "dexxfer/demo/demo.h"

namespace {

using dexxfer::DemoFrame;
using dexxfer::DemoSequence;
using Eigen::Vector3d;

constexpr int kFrames = 240;
constexpr double kFps = 120.0;
constexpr double kHalf = 0.025;       // cube half extent
constexpr double kPad = 0.009;        // keypoint offset from the surface
constexpr double kOpen = 0.065;       // open-hand fingertip |x|
constexpr double kApproach = 0.08;    // start height above the grasp
constexpr double kLift = 0.15;

double MinJerk(double t0, double t1, double t) {
  const double s = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_lift_box <out.json>\n";
    return 2;
  }
  std::vector<Vector3d> cube;
  for (int i = 0; i < 8; ++i) {
    cube.emplace_back((i & 1) ? kHalf : -kHalf, (i & 2) ? kHalf : -kHalf,
                      (i & 4) ? kHalf : -kHalf);
  }
  DemoSequence demo;
  demo.fps = kFps;
  demo.object = dexxfer::PreprocessObject({cube}, Vector3d::Zero(), 0.1, 0.0);

  for (int t = 0; t < kFrames; ++t) {
    const double descend = 1.0 - MinJerk(0, 60, t);
    const double close = MinJerk(60, 90, t);
    const double lift = kLift * MinJerk(95, 155, t);

    DemoFrame f;
    f.object.position = Vector3d(0.0, 0.0, kHalf + lift);
    const Vector3d c = f.object.position + Vector3d(0.0, 0.0, kApproach * descend);
    const double x = kOpen + (kHalf + kPad - kOpen) * close;
    const Vector3d tips[5] = {
        c + Vector3d(-x, 0.0, 0.0),
        c + Vector3d(x, 0.012, 0.0),
        c + Vector3d(x, -0.012, 0.0),
        // Ring and little finger stay curled against the palm.
        c + Vector3d(0.02, 0.06, 0.075),
        c + Vector3d(0.0, 0.075, 0.075),
    };
    for (int i = 0; i < 5; ++i) f.hand.segment<3>(3 * i) = tips[i];
    f.hand.tail<3>() = Vector3d(0.0, 0.0, -1.0);
    demo.frames.push_back(f);
  }
  dexxfer::SaveDemo(demo, argv[1]);
  return 0;
}
