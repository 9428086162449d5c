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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "looseimu/errors.h"
#include "oracles.h"

namespace looseimu {
namespace {

using testing::ChainWalkPosition;
using testing::QuaternionDotAngleDeg;
using testing::RandomRotation;

TEST(RotationTest, ViewsRoundTrip) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const Rotation r = RandomRotation(rng);
    for (auto view : {RotationView::kQuat, RotationView::kMatrix,
                      RotationView::kAxisAngle, RotationView::kSixD}) {
      const auto values = Convert(r, view);
      EXPECT_LT(AngularOffsetDeg(r, FromView(values, view)), 1e-6);
    }
  }
}

TEST(RotationTest, SixDIsFirstTwoMatrixColumns) {
  const Rotation r = Rotation::About(Vec3(1, 2, 3).normalized(), 0.7);
  const Mat3 m = r.matrix();
  const auto six = r.six_d();
  EXPECT_DOUBLE_EQ(six[0], m(0, 0));
  EXPECT_DOUBLE_EQ(six[1], m(0, 1));
  EXPECT_DOUBLE_EQ(six[2], m(1, 0));
  EXPECT_DOUBLE_EQ(six[3], m(1, 1));
  EXPECT_DOUBLE_EQ(six[4], m(2, 0));
  EXPECT_DOUBLE_EQ(six[5], m(2, 1));
}

TEST(RotationTest, SixDGramSchmidtMatchesManualOrthonormalization) {
  const std::array<double, 6> six = {1.0, 0.3, 0.2, 2.0, -0.1, 0.5};
  const Vec3 a(six[0], six[2], six[4]);
  const Vec3 b(six[1], six[3], six[5]);
  const Vec3 c0 = a.normalized();
  const Vec3 c1 = (b - c0.dot(b) * c0).normalized();
  const Mat3 m = Rotation::FromSixD(six).matrix();
  EXPECT_LT((m.col(0) - c0).norm(), 1e-12);
  EXPECT_LT((m.col(1) - c1).norm(), 1e-12);
  EXPECT_LT((m.col(2) - c0.cross(c1)).norm(), 1e-12);
}

TEST(RotationTest, DegenerateSixDThrows) {
  const std::array<double, 6> zero = {0, 0, 0, 0, 0, 0};
  EXPECT_THROW(Rotation::FromSixD(zero), ValidationError);
  const std::array<double, 6> parallel = {1, 2, 0, 0, 0, 0};
  EXPECT_THROW(Rotation::FromSixD(parallel), ValidationError);
}

TEST(RotationTest, ViewRejectsWrongLength) {
  const std::vector<double> three = {1, 0, 0};
  EXPECT_THROW(FromView(three, RotationView::kQuat), ShapeError);
}

TEST(AngularOffsetTest, KnownValues) {
  const Rotation a = Rotation::Identity();
  EXPECT_NEAR(AngularOffsetDeg(a, a), 0.0, 1e-12);
  EXPECT_NEAR(AngularOffsetDeg(a, Rotation::About(Vec3::UnitZ(), M_PI / 2)), 90.0, 1e-9);
  EXPECT_NEAR(AngularOffsetDeg(a, Rotation::About(Vec3::UnitX(), M_PI)), 180.0, 1e-6);
  // Sign of the quaternion does not matter.
  const Rotation r = Rotation::About(Vec3::UnitY(), 0.4);
  const Rotation neg(Eigen::Quaterniond(-r.quat().coeffs()));
  EXPECT_NEAR(AngularOffsetDeg(r, neg), 0.0, 1e-6);
}

TEST(AngularOffsetTest, MatchesQuaternionDotOracle) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const Rotation a = RandomRotation(rng);
    const Rotation b = RandomRotation(rng);
    ASSERT_NEAR(AngularOffsetDeg(a, b), QuaternionDotAngleDeg(a, b), 1e-4);
  }
}

TEST(AngularOffsetTest, SmallAnglesStayAccurate) {
  for (double deg : {1e-6, 1e-4, 1e-2, 1.0}) {
    const Rotation r = Rotation::About(Vec3(0.3, -0.4, 0.5).normalized(), deg * M_PI / 180);
    EXPECT_NEAR(AngularOffsetDeg(Rotation::Identity(), r), deg, 1e-6 * std::max(1.0, deg));
  }
}

TEST(SkeletonTest, SmplTreeIsValid) {
  const Skeleton& s = Skeleton::Smpl();
  EXPECT_NO_THROW(s.Validate());
  EXPECT_EQ(s.UpperBodyJoints().size(), 14u);
  EXPECT_EQ(s.parent[kLeftWrist], kLeftElbow);
  Skeleton broken = s;
  broken.parent[5] = 7;
  EXPECT_THROW(broken.Validate(), ValidationError);
}

TEST(ForwardKinematicsTest, RestPoseAccumulatesOffsets) {
  const Skeleton& s = Skeleton::Smpl();
  std::vector<Rotation> local(kJointCount);
  const Vec3 root(1.0, -2.0, 0.9);
  const GlobalPose g = ForwardKinematics(s, local, root);
  for (int j = 0; j < kJointCount; ++j) {
    Vec3 expected = root;
    for (int k = j; k > 0; k = s.parent[k]) expected += s.rest_offset[k];
    EXPECT_LT((g.position[j] - expected).norm(), 1e-12);
  }
}

TEST(ForwardKinematicsTest, MatchesChainWalkOracleOnRandomPoses) {
  const Skeleton& s = Skeleton::Smpl();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Rotation> local(kJointCount);
    for (auto& r : local) r = RandomRotation(rng);
    const Vec3 root(n(rng), n(rng), n(rng));
    const GlobalPose g = ForwardKinematics(s, local, root);
    for (int j = 0; j < kJointCount; ++j)
      worst = std::max(worst, (g.position[j] - ChainWalkPosition(s, local, root, j)).norm());
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(ForwardKinematicsTest, WrongJointCountThrows) {
  std::vector<Rotation> local(23);
  EXPECT_THROW(ForwardKinematics(Skeleton::Smpl(), local, Vec3::Zero()), ShapeError);
}

TEST(PoseSequenceTest, SliceAndSequenceFk) {
  PoseSequence pose(10, 30.0);
  for (int f = 0; f < 10; ++f) {
    pose.root_translation(f) = Vec3(f, 0, 0);
    pose.rotation(f, kLeftElbow) = Rotation::About(Vec3::UnitZ(), 0.1 * f);
  }
  const PoseSequence part = pose.Slice(3, 4);
  EXPECT_EQ(part.frames(), 4);
  EXPECT_DOUBLE_EQ(part.root_translation(0).x(), 3.0);
  const GlobalSequence g = ForwardKinematicsSequence(Skeleton::Smpl(), pose);
  EXPECT_EQ(g.frames, 10);
  EXPECT_EQ(g.position.size(), 240u);
  EXPECT_THROW(pose.Slice(8, 4), SequenceLengthError);
  EXPECT_THROW(PoseSequence(0, 30.0), SequenceLengthError);
}

TEST(SlerpTest, EndpointsAndMidpoint) {
  const Rotation a = Rotation::About(Vec3::UnitZ(), 0.2);
  const Rotation b = Rotation::About(Vec3::UnitZ(), 1.0);
  EXPECT_LT(AngularOffsetDeg(Slerp(a, b, 0.0), a), 1e-7);
  EXPECT_LT(AngularOffsetDeg(Slerp(a, b, 1.0), b), 1e-7);
  EXPECT_NEAR(AngularOffsetDeg(Slerp(a, b, 0.5), Rotation::About(Vec3::UnitZ(), 0.6)), 0.0, 1e-6);
}

}  // namespace
}  // namespace looseimu
