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

#include "looseimu/motion_gen.h"

#include <array>
#include <cmath>
#include <random>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

// Scalar pose parameters; L/R pairs are adjacent.
enum Param : int {
  kSpinePitch, kSpineRoll, kSpineYaw, kNeckPitch, kNeckYaw,
  kPelvisPitch, kPelvisRoll,
  kHipFlexL, kHipFlexR, kHipAbdL, kHipAbdR, kKneeL, kKneeR,
  kAnkleL, kAnkleR,
  kCollarL, kCollarR, kShoulderDownL, kShoulderDownR,
  kShoulderFwdL, kShoulderFwdR, kElbowL, kElbowR, kWristL, kWristR,
  kHeightDrop, kSpeed, kYawRate,
  kParamCount
};
using Params = std::array<double, kParamCount>;

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kPelvisHeight = 0.93;

Params Neutral() {
  Params p{};
  p[kShoulderDownL] = p[kShoulderDownR] = 1.3;
  p[kElbowL] = p[kElbowR] = 0.2;
  return p;
}

double Bump(double tau, double freq) {
  return 0.5 - 0.5 * std::cos(kTwoPi * freq * tau);
}

struct Segment {
  Activity activity = Activity::kStand;
  int start = 0;
  int length = 0;
  std::array<double, 6> u{};  // activity parameters in [0, 1)
  double sign = 1.0;
};

Params Evaluate(const Segment& seg, double tau) {
  Params p = Neutral();
  const auto& u = seg.u;
  switch (seg.activity) {
    case Activity::kStand: {
      const double f = 0.15 + 0.2 * u[0];
      p[kSpineRoll] = 0.05 * std::sin(kTwoPi * f * tau);
      p[kSpinePitch] = 0.04 * std::sin(kTwoPi * 0.7 * f * tau + u[1] * 6);
      p[kNeckYaw] = 0.4 * (u[2] - 0.5) * std::sin(kTwoPi * 0.1 * tau);
      break;
    }
    case Activity::kWalk: {
      const double speed = 0.8 + 0.8 * u[0];
      const double f = 0.75 + 0.35 * u[0];
      const double amp = 0.3 + 0.2 * u[1];
      const double phi = kTwoPi * f * tau;
      const double s = std::sin(phi);
      p[kHipFlexL] = amp * s;
      p[kHipFlexR] = -amp * s;
      p[kKneeL] = 0.1 + (0.5 + 0.4 * u[2]) * std::max(0.0, std::sin(phi - 1.2));
      p[kKneeR] = 0.1 + (0.5 + 0.4 * u[2]) * std::max(0.0, std::sin(phi - 1.2 + M_PI));
      p[kAnkleL] = 0.2 * std::sin(phi - 0.6);
      p[kAnkleR] = -0.2 * std::sin(phi - 0.6);
      p[kShoulderFwdL] = -0.7 * amp * s;
      p[kShoulderFwdR] = 0.7 * amp * s;
      p[kElbowL] = 0.3 + 0.15 * s;
      p[kElbowR] = 0.3 - 0.15 * s;
      p[kPelvisRoll] = 0.05 * s;
      p[kSpineYaw] = -0.1 * s;
      p[kSpinePitch] = 0.05 + 0.05 * u[3];
      p[kHeightDrop] = 0.02 * std::abs(std::cos(phi));
      p[kSpeed] = speed;
      p[kYawRate] = 0.5 * (u[4] - 0.5);
      break;
    }
    case Activity::kArmRaise: {
      const double f = 0.2 + 0.3 * u[0];
      const double amp = 1.0 + 1.4 * u[1];
      const double lag = u[2] < 0.5 ? 0.0 : M_PI;  // together or alternating
      const bool forward = u[3] < 0.4;
      const double hl = Bump(tau, f);
      const double hr = 0.5 - 0.5 * std::cos(kTwoPi * f * tau + lag);
      if (forward) {
        p[kShoulderFwdL] = amp * hl;
        p[kShoulderFwdR] = amp * hr;
      } else {
        p[kShoulderDownL] = 1.3 - amp * hl;
        p[kShoulderDownR] = 1.3 - amp * hr;
      }
      p[kElbowL] = 0.2 + 0.8 * u[4] * hl;
      p[kElbowR] = 0.2 + 0.8 * u[4] * hr;
      break;
    }
    case Activity::kBend: {
      const double f = 0.15 + 0.2 * u[0];
      const double h = Bump(tau, f);
      const double pitch = (0.4 + 0.8 * u[1]) * h;
      p[kSpinePitch] = pitch;
      p[kPelvisPitch] = 0.3 * pitch;
      p[kHipFlexL] = p[kHipFlexR] = 0.3 * pitch;
      p[kKneeL] = p[kKneeR] = 0.2 * pitch * u[2];
      p[kSpineRoll] = 0.3 * (u[3] - 0.5) * h;
      // Arms hang under gravity.
      p[kShoulderFwdL] = p[kShoulderFwdR] = 1.3 * pitch;
      p[kNeckPitch] = -0.3 * pitch;
      break;
    }
    case Activity::kSquat: {
      const double f = 0.15 + 0.2 * u[0];
      const double h = Bump(tau, f);
      const double depth = 0.4 + 0.7 * u[1];
      p[kHipFlexL] = p[kHipFlexR] = depth * h;
      p[kKneeL] = p[kKneeR] = 2.0 * depth * h;
      p[kAnkleL] = p[kAnkleR] = depth * h;
      p[kPelvisPitch] = 0.3 * depth * h;
      p[kSpinePitch] = 0.2 * depth * h;
      p[kHeightDrop] = 0.35 * depth * h;
      p[kShoulderFwdL] = p[kShoulderFwdR] = 1.2 * u[2] * h;
      break;
    }
    case Activity::kTurn: {
      const double f = 0.9 + 0.3 * u[0];
      const double phi = kTwoPi * f * tau;
      p[kYawRate] = seg.sign * (0.6 + 0.9 * u[1]);
      p[kHipFlexL] = 0.15 * std::max(0.0, std::sin(phi));
      p[kHipFlexR] = 0.15 * std::max(0.0, -std::sin(phi));
      p[kKneeL] = 0.1 + 0.3 * std::max(0.0, std::sin(phi));
      p[kKneeR] = 0.1 + 0.3 * std::max(0.0, -std::sin(phi));
      p[kNeckYaw] = 0.3 * seg.sign;
      p[kShoulderDownL] = p[kShoulderDownR] = 1.1;
      break;
    }
    case Activity::kReach: {
      const double f = 0.2 + 0.25 * u[0];
      const double h = Bump(tau, f);
      const double reach = (0.6 + 1.0 * u[1]) * h;
      const int fwd = seg.sign > 0 ? kShoulderFwdL : kShoulderFwdR;
      const int down = seg.sign > 0 ? kShoulderDownL : kShoulderDownR;
      const int elbow = seg.sign > 0 ? kElbowL : kElbowR;
      p[fwd] = reach;
      p[down] = 1.3 - 0.6 * u[2] * h;
      p[elbow] = 0.2 + 0.4 * (1.0 - h);
      p[kSpineYaw] = -0.35 * seg.sign * h;
      p[kSpinePitch] = 0.25 * u[3] * h;
      break;
    }
  }
  return p;
}

struct Wander {
  std::array<double, kParamCount> f1, f2, ph1, ph2;
};

Rotation Rx(double a) { return Rotation::About(Vec3::UnitX(), a); }
Rotation Ry(double a) { return Rotation::About(Vec3::UnitY(), a); }
Rotation Rz(double a) { return Rotation::About(Vec3::UnitZ(), a); }

void BuildFrame(const Params& p, double heading, PoseSequence& pose, int f) {
  pose.rotation(f, kPelvis) =
      Rz(heading) * Ry(p[kPelvisPitch]) * Rx(p[kPelvisRoll]);
  const Rotation spine = Rz(p[kSpineYaw] / 3) * Ry(p[kSpinePitch] / 3) *
                         Rx(p[kSpineRoll] / 3);
  pose.rotation(f, kSpine1) = spine;
  pose.rotation(f, kSpine2) = spine;
  pose.rotation(f, kSpine3) = spine;
  pose.rotation(f, kNeck) = Rz(p[kNeckYaw] * 0.5) * Ry(p[kNeckPitch] * 0.5);
  pose.rotation(f, kHead) = Rz(p[kNeckYaw] * 0.5) * Ry(p[kNeckPitch] * 0.5);
  pose.rotation(f, kLeftHip) = Ry(-p[kHipFlexL]) * Rx(p[kHipAbdL]);
  pose.rotation(f, kRightHip) = Ry(-p[kHipFlexR]) * Rx(-p[kHipAbdR]);
  pose.rotation(f, kLeftKnee) = Ry(p[kKneeL]);
  pose.rotation(f, kRightKnee) = Ry(p[kKneeR]);
  pose.rotation(f, kLeftAnkle) = Ry(-p[kAnkleL]);
  pose.rotation(f, kRightAnkle) = Ry(-p[kAnkleR]);
  pose.rotation(f, kLeftFoot) = Rotation::Identity();
  pose.rotation(f, kRightFoot) = Rotation::Identity();
  pose.rotation(f, kLeftCollar) = Rx(-p[kCollarL]);
  pose.rotation(f, kRightCollar) = Rx(p[kCollarR]);
  pose.rotation(f, kLeftShoulder) =
      Ry(-p[kShoulderFwdL]) * Rx(-p[kShoulderDownL]);
  pose.rotation(f, kRightShoulder) =
      Ry(-p[kShoulderFwdR]) * Rx(p[kShoulderDownR]);
  pose.rotation(f, kLeftElbow) = Rz(-p[kElbowL]);
  pose.rotation(f, kRightElbow) = Rz(p[kElbowR]);
  pose.rotation(f, kLeftWrist) = Rx(-p[kWristL]);
  pose.rotation(f, kRightWrist) = Rx(p[kWristR]);
  pose.rotation(f, kLeftHand) = Rotation::Identity();
  pose.rotation(f, kRightHand) = Rotation::Identity();
}

}  // namespace

std::string ToString(Activity a) {
  switch (a) {
    case Activity::kStand: return "stand";
    case Activity::kWalk: return "walk";
    case Activity::kArmRaise: return "arm_raise";
    case Activity::kBend: return "bend";
    case Activity::kSquat: return "squat";
    case Activity::kTurn: return "turn";
    case Activity::kReach: return "reach";
  }
  return "unknown";
}

GeneratedMotion GenerateMotion(int frames, uint64_t seed,
                               const MotionGenOptions& options) {
  if (frames < 0) throw SequenceLengthError("negative frame count");
  if (options.fps <= 0 || options.min_segment_seconds <= 0 ||
      options.max_segment_seconds < options.min_segment_seconds ||
      options.blend_seconds < 0) {
    throw ConfigError("invalid motion generator options");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double fps = options.fps;

  std::vector<Segment> segments;
  for (int start = 0; start < frames;) {
    Segment seg;
    seg.activity = static_cast<Activity>(
        std::uniform_int_distribution<int>(0, kActivityCount - 1)(rng));
    seg.start = start;
    const double seconds =
        options.min_segment_seconds +
        (options.max_segment_seconds - options.min_segment_seconds) * unit(rng);
    seg.length = std::max(1, static_cast<int>(std::lround(seconds * fps)));
    for (double& v : seg.u) v = unit(rng);
    seg.sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    segments.push_back(seg);
    start += seg.length;
  }

  Wander w;
  for (int i = 0; i < kParamCount; ++i) {
    w.f1[i] = 0.05 + 0.25 * unit(rng);
    w.f2[i] = 0.2 + 0.4 * unit(rng);
    w.ph1[i] = kTwoPi * unit(rng);
    w.ph2[i] = kTwoPi * unit(rng);
  }
  const double initial_heading = kTwoPi * unit(rng);

  GeneratedMotion out{PoseSequence(frames, fps), std::vector<Activity>(frames)};
  const int blend = static_cast<int>(std::lround(options.blend_seconds * fps));
  double heading = initial_heading;
  Vec3 position(0.0, 0.0, kPelvisHeight);
  size_t seg_index = 0;
  for (int f = 0; f < frames; ++f) {
    while (f >= segments[seg_index].start + segments[seg_index].length)
      ++seg_index;
    const Segment& cur = segments[seg_index];
    const double t = f / fps;
    Params p = Evaluate(cur, (f - cur.start) / fps);
    out.activity[f] = cur.activity;
    if (seg_index > 0 && f - cur.start < blend) {
      const Segment& prev = segments[seg_index - 1];
      const Params q = Evaluate(prev, (f - prev.start) / fps);
      const double x = static_cast<double>(f - cur.start) / blend;
      const double a = x * x * (3.0 - 2.0 * x);
      for (int i = 0; i < kParamCount; ++i) p[i] = a * p[i] + (1.0 - a) * q[i];
      if (a < 0.5) out.activity[f] = prev.activity;
    }
    for (int i = 0; i < kHeightDrop; ++i) {
      p[i] += options.wander_rad *
              (0.6 * std::sin(kTwoPi * w.f1[i] * t + w.ph1[i]) +
               0.4 * std::sin(kTwoPi * w.f2[i] * t + w.ph2[i]));
    }
    heading += p[kYawRate] / fps;
    position += Vec3(std::cos(heading), std::sin(heading), 0.0) *
                (p[kSpeed] / fps);
    position.z() = kPelvisHeight - p[kHeightDrop];
    out.pose.root_translation(f) = position;
    BuildFrame(p, heading, out.pose, f);
  }
  return out;
}

}  // namespace looseimu
