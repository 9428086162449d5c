// Copyright 2026 The LooseIMU Authors
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

#ifndef LOOSEIMU_MOTION_GEN_H_
#define LOOSEIMU_MOTION_GEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "looseimu/kinematics.h"

namespace looseimu {

enum class Activity { kStand, kWalk, kArmRaise, kBend, kSquat, kTurn, kReach };
inline constexpr int kActivityCount = 7;
std::string ToString(Activity a);

struct MotionGenOptions {
  double fps = 30.0;
  double min_segment_seconds = 3.0;
  double max_segment_seconds = 8.0;
  // Crossfade between consecutive activity segments.
  double blend_seconds = 0.8;
  // Amplitude of the slow per-channel wander added on top, radians.
  double wander_rad = 0.08;
};

struct GeneratedMotion {
  PoseSequence pose;
  // Dominant activity per frame.
  std::vector<Activity> activity;
};

// Procedural full-body motion: a random sequence of parameterized
// activities (walking, arm raises, bending, squats, turning, reaching,
// idle standing) blended smoothly, plus low-frequency joint wander.
// Deterministic in `seed`.
GeneratedMotion GenerateMotion(int frames, uint64_t seed,
                               const MotionGenOptions& options = {});

}  // namespace looseimu

#endif  // LOOSEIMU_MOTION_GEN_H_
