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

#ifndef LOOSEIMU_KINEMATICS_H_
#define LOOSEIMU_KINEMATICS_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace looseimu {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Unit quaternion rotation. All constructors normalize.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}
  explicit Rotation(const Eigen::Quaterniond& q);
  Rotation(double w, double x, double y, double z)
      : Rotation(Eigen::Quaterniond(w, x, y, z)) {}

  static Rotation Identity() { return Rotation(); }
  static Rotation FromMatrix(const Mat3& m);
  // Axis-angle vector, radians.
  static Rotation FromAxisAngle(const Vec3& v);
  static Rotation About(const Vec3& axis, double radians);
  // Gram-Schmidt on the two columns encoded as (m00, m01, m10, m11, m20, m21).
  // Throws ValidationError when the columns are degenerate.
  static Rotation FromSixD(std::span<const double> six);

  const Eigen::Quaterniond& quat() const { return q_; }
  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Vec3 axis_angle() const;
  // Rotation angle in [0, pi].
  double angle() const;
  std::array<double, 6> six_d() const;

  Rotation inverse() const { return Rotation(q_.conjugate()); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }
  Rotation operator*(const Rotation& other) const {
    return Rotation(q_ * other.q_);
  }

 private:
  Eigen::Quaterniond q_;
};

enum class RotationView { kQuat, kMatrix, kAxisAngle, kSixD };

// Flattened view: quat (w,x,y,z), matrix (row-major 9), axis-angle (3),
// 6D (first two matrix columns, row-major).
std::vector<double> Convert(const Rotation& r, RotationView view);
Rotation FromView(std::span<const double> values, RotationView view);

// Angle of Ra^T * Rb in degrees, [0, 180].
double AngularOffsetDeg(const Rotation& a, const Rotation& b);

Rotation Slerp(const Rotation& from, const Rotation& to, double t);

inline constexpr int kJointCount = 24;
inline constexpr int kRootJoint = 0;

enum SmplJoint : int {
  kPelvis = 0,
  kLeftHip = 1,
  kRightHip = 2,
  kSpine1 = 3,
  kLeftKnee = 4,
  kRightKnee = 5,
  kSpine2 = 6,
  kLeftAnkle = 7,
  kRightAnkle = 8,
  kSpine3 = 9,
  kLeftFoot = 10,
  kRightFoot = 11,
  kNeck = 12,
  kLeftCollar = 13,
  kRightCollar = 14,
  kHead = 15,
  kLeftShoulder = 16,
  kRightShoulder = 17,
  kLeftElbow = 18,
  kRightElbow = 19,
  kLeftWrist = 20,
  kRightWrist = 21,
  kLeftHand = 22,
  kRightHand = 23,
};

// 24-joint SMPL kinematic tree with a fixed neutral rest pose (z up,
// x forward, y left, meters). See docs/skeleton.md for the offset table.
struct Skeleton {
  std::array<int, kJointCount> parent;
  std::array<Vec3, kJointCount> rest_offset;
  std::array<std::string, kJointCount> joint_names;
  std::array<bool, kJointCount> upper_body_mask;

  static const Skeleton& Smpl();

  // Throws ValidationError if the tree or mask invariants are broken.
  void Validate() const;
  std::vector<int> UpperBodyJoints() const;
};

struct GlobalPose {
  std::vector<Rotation> rotation;
  std::vector<Vec3> position;
};

// Local (parent-relative) rotations for every joint plus root translation.
// Throws ShapeError when `local` does not hold exactly 24 rotations.
GlobalPose ForwardKinematics(const Skeleton& skeleton,
                             std::span<const Rotation> local,
                             const Vec3& root_translation);

class PoseSequence {
 public:
  PoseSequence() = default;
  PoseSequence(int frames, double fps);

  int frames() const { return frames_; }
  double fps() const { return fps_; }

  Vec3& root_translation(int f) { return root_translation_[f]; }
  const Vec3& root_translation(int f) const { return root_translation_[f]; }
  Rotation& rotation(int f, int j) { return rotations_[f * kJointCount + j]; }
  const Rotation& rotation(int f, int j) const {
    return rotations_[f * kJointCount + j];
  }
  std::span<const Rotation> frame(int f) const {
    return {rotations_.data() + f * kJointCount, kJointCount};
  }

  // Frames [start, start + count).
  PoseSequence Slice(int start, int count) const;

 private:
  int frames_ = 0;
  double fps_ = 30.0;
  std::vector<Vec3> root_translation_;
  std::vector<Rotation> rotations_;
};

// Global joint rotations/positions for every frame, row = frame.
struct GlobalSequence {
  int frames = 0;
  std::vector<Rotation> rotation;  // frames * 24
  std::vector<Vec3> position;      // frames * 24
};

GlobalSequence ForwardKinematicsSequence(const Skeleton& skeleton,
                                         const PoseSequence& pose);

}  // namespace looseimu

#endif  // LOOSEIMU_KINEMATICS_H_
