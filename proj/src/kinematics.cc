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

#include "looseimu/kinematics.h"

#include <cmath>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

constexpr double kRadToDeg = 180.0 / M_PI;
constexpr double kSmallAngle = 1e-4;

Skeleton BuildSmpl() {
  Skeleton s;
  s.parent = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8,
              9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};
  s.joint_names = {"pelvis",         "left_hip",       "right_hip",
                   "spine1",         "left_knee",      "right_knee",
                   "spine2",         "left_ankle",     "right_ankle",
                   "spine3",         "left_foot",      "right_foot",
                   "neck",           "left_collar",    "right_collar",
                   "head",           "left_shoulder",  "right_shoulder",
                   "left_elbow",     "right_elbow",    "left_wrist",
                   "right_wrist",    "left_hand",      "right_hand"};
  // Neutral adult, about 1.70 m standing height with the pelvis at 0.93 m.
  s.rest_offset = {Vec3(0.0, 0.0, 0.0),      Vec3(0.0, 0.09, -0.08),
                   Vec3(0.0, -0.09, -0.08),  Vec3(-0.01, 0.0, 0.11),
                   Vec3(0.0, 0.01, -0.38),   Vec3(0.0, -0.01, -0.38),
                   Vec3(0.01, 0.0, 0.13),    Vec3(-0.02, 0.0, -0.40),
                   Vec3(-0.02, 0.0, -0.40),  Vec3(0.0, 0.0, 0.05),
                   Vec3(0.12, 0.0, -0.06),   Vec3(0.12, 0.0, -0.06),
                   Vec3(-0.01, 0.0, 0.21),   Vec3(0.0, 0.07, 0.11),
                   Vec3(0.0, -0.07, 0.11),   Vec3(0.03, 0.0, 0.09),
                   Vec3(0.0, 0.12, 0.02),    Vec3(0.0, -0.12, 0.02),
                   Vec3(0.0, 0.26, 0.0),     Vec3(0.0, -0.26, 0.0),
                   Vec3(0.0, 0.25, 0.0),     Vec3(0.0, -0.25, 0.0),
                   Vec3(0.0, 0.08, 0.0),     Vec3(0.0, -0.08, 0.0)};
  s.upper_body_mask.fill(false);
  for (int j : {kPelvis, kSpine1, kSpine2, kSpine3, kNeck, kLeftCollar,
                kRightCollar, kHead, kLeftShoulder, kRightShoulder, kLeftElbow,
                kRightElbow, kLeftWrist, kRightWrist}) {
    s.upper_body_mask[j] = true;
  }
  return s;
}

}  // namespace

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(q) {
  const double n = q_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ValidationError("rotation quaternion has zero or non-finite norm");
  }
  q_.coeffs() /= n;
}

Rotation Rotation::FromMatrix(const Mat3& m) {
  return Rotation(Eigen::Quaterniond(m));
}

Rotation Rotation::FromAxisAngle(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    // First-order expansion keeps the direction for tiny rotations.
    return Rotation(1.0, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z());
  }
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle, v / angle)));
}

Rotation Rotation::About(const Vec3& axis, double radians) {
  return Rotation(
      Eigen::Quaterniond(Eigen::AngleAxisd(radians, axis.normalized())));
}

Rotation Rotation::FromSixD(std::span<const double> six) {
  if (six.size() != 6) throw ShapeError("6D rotation needs 6 values");
  Vec3 a(six[0], six[2], six[4]);
  Vec3 b(six[1], six[3], six[5]);
  const double na = a.norm();
  if (!(na > 1e-12)) throw ValidationError("degenerate 6D rotation");
  const Vec3 c0 = a / na;
  Vec3 c1 = b - c0.dot(b) * c0;
  const double nb = c1.norm();
  if (!(nb > 1e-12)) throw ValidationError("degenerate 6D rotation");
  c1 /= nb;
  Mat3 m;
  m.col(0) = c0;
  m.col(1) = c1;
  m.col(2) = c0.cross(c1);
  return FromMatrix(m);
}

double Rotation::angle() const {
  const double s = q_.vec().norm();
  const double w = std::abs(q_.w());
  if (s < kSmallAngle) return 2.0 * std::asin(std::min(s, 1.0));
  return 2.0 * std::atan2(s, w);
}

Vec3 Rotation::axis_angle() const {
  const Vec3 v = q_.w() < 0.0 ? Vec3(-q_.vec()) : Vec3(q_.vec());
  const double s = v.norm();
  if (s < 1e-15) return Vec3::Zero();
  return v * (angle() / s);
}

std::array<double, 6> Rotation::six_d() const {
  const Mat3 m = matrix();
  return {m(0, 0), m(0, 1), m(1, 0), m(1, 1), m(2, 0), m(2, 1)};
}

std::vector<double> Convert(const Rotation& r, RotationView view) {
  switch (view) {
    case RotationView::kQuat: {
      const auto& q = r.quat();
      return {q.w(), q.x(), q.y(), q.z()};
    }
    case RotationView::kMatrix: {
      const Mat3 m = r.matrix();
      std::vector<double> out(9);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) out[i * 3 + k] = m(i, k);
      return out;
    }
    case RotationView::kAxisAngle: {
      const Vec3 v = r.axis_angle();
      return {v.x(), v.y(), v.z()};
    }
    case RotationView::kSixD: {
      const auto s = r.six_d();
      return {s.begin(), s.end()};
    }
  }
  return {};
}

Rotation FromView(std::span<const double> v, RotationView view) {
  switch (view) {
    case RotationView::kQuat:
      if (v.size() != 4) throw ShapeError("quaternion view needs 4 values");
      return Rotation(v[0], v[1], v[2], v[3]);
    case RotationView::kMatrix: {
      if (v.size() != 9) throw ShapeError("matrix view needs 9 values");
      Mat3 m;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) m(i, k) = v[i * 3 + k];
      return Rotation::FromMatrix(m);
    }
    case RotationView::kAxisAngle:
      if (v.size() != 3) throw ShapeError("axis-angle view needs 3 values");
      return Rotation::FromAxisAngle(Vec3(v[0], v[1], v[2]));
    case RotationView::kSixD:
      return Rotation::FromSixD(v);
  }
  throw ShapeError("unknown rotation view");
}

double AngularOffsetDeg(const Rotation& a, const Rotation& b) {
  const Mat3 offset = a.matrix().transpose() * b.matrix();
  return Rotation::FromMatrix(offset).angle() * kRadToDeg;
}

Rotation Slerp(const Rotation& from, const Rotation& to, double t) {
  return Rotation(from.quat().slerp(t, to.quat()));
}

const Skeleton& Skeleton::Smpl() {
  static const Skeleton skeleton = BuildSmpl();
  return skeleton;
}

void Skeleton::Validate() const {
  if (parent[0] != -1) throw ValidationError("joint 0 must be the root");
  for (int j = 1; j < kJointCount; ++j) {
    if (parent[j] < 0 || parent[j] >= j) {
      throw ValidationError("parent index must precede child: joint " +
                            std::to_string(j));
    }
  }
  int upper = 0;
  for (bool b : upper_body_mask) upper += b ? 1 : 0;
  if (upper != 14) throw ValidationError("upper-body mask must select 14 joints");
}

std::vector<int> Skeleton::UpperBodyJoints() const {
  std::vector<int> out;
  for (int j = 0; j < kJointCount; ++j)
    if (upper_body_mask[j]) out.push_back(j);
  return out;
}

GlobalPose ForwardKinematics(const Skeleton& skeleton,
                             std::span<const Rotation> local,
                             const Vec3& root_translation) {
  if (local.size() != kJointCount) {
    throw ShapeError("forward kinematics expects 24 joint rotations, got " +
                     std::to_string(local.size()));
  }
  GlobalPose g;
  g.rotation.resize(kJointCount);
  g.position.resize(kJointCount);
  g.rotation[0] = local[0];
  g.position[0] = root_translation;
  for (int j = 1; j < kJointCount; ++j) {
    const int p = skeleton.parent[j];
    g.rotation[j] = g.rotation[p] * local[j];
    g.position[j] = g.position[p] + g.rotation[p] * skeleton.rest_offset[j];
  }
  return g;
}

PoseSequence::PoseSequence(int frames, double fps)
    : frames_(frames),
      fps_(fps),
      root_translation_(frames, Vec3::Zero()),
      rotations_(static_cast<size_t>(frames) * kJointCount) {
  if (frames < 1) throw SequenceLengthError("pose sequence needs >= 1 frame");
  if (!(fps > 0.0)) throw ValidationError("fps must be positive");
}

PoseSequence PoseSequence::Slice(int start, int count) const {
  if (start < 0 || count < 1 || start + count > frames_) {
    throw SequenceLengthError("slice out of range");
  }
  PoseSequence out(count, fps_);
  for (int f = 0; f < count; ++f) {
    out.root_translation(f) = root_translation(start + f);
    for (int j = 0; j < kJointCount; ++j)
      out.rotation(f, j) = rotation(start + f, j);
  }
  return out;
}

GlobalSequence ForwardKinematicsSequence(const Skeleton& skeleton,
                                         const PoseSequence& pose) {
  GlobalSequence out;
  out.frames = pose.frames();
  out.rotation.reserve(static_cast<size_t>(out.frames) * kJointCount);
  out.position.reserve(static_cast<size_t>(out.frames) * kJointCount);
  for (int f = 0; f < pose.frames(); ++f) {
    GlobalPose g =
        ForwardKinematics(skeleton, pose.frame(f), pose.root_translation(f));
    out.rotation.insert(out.rotation.end(), g.rotation.begin(),
                        g.rotation.end());
    out.position.insert(out.position.end(), g.position.begin(),
                        g.position.end());
  }
  return out;
}

}  // namespace looseimu
