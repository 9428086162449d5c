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

#include "looseimu/imusim.h"

#include <gtest/gtest.h>

#include <cmath>

#include "looseimu/errors.h"
#include "looseimu/motion_gen.h"

namespace looseimu {
namespace {

PoseSequence Motion(int frames, uint64_t seed = 5) {
  return GenerateMotion(frames, seed).pose;
}

double MeanOffset(const SensorTrack& tight, const SensorTrack& loose) {
  const auto per_sensor = OffsetReport(tight, loose);
  double sum = 0.0;
  for (double v : per_sensor) sum += v;
  return sum / per_sensor.size();
}

TEST(ImuSimTest, RigidGarmentReproducesTightData) {
  const PoseSequence pose = Motion(300);
  GarmentProxy rigid;
  rigid.gamma = 24.0;
  rigid.rigid = true;
  const SensorTrack tight = SimulateTight(pose, SixSensorSet());
  const LooseSimulation loose = SimulateLoose(pose, SixSensorSet(), rigid, 1);
  for (double offset : OffsetReport(tight, loose.track)) EXPECT_LE(offset, 1e-3);
  for (int f = 0; f < pose.frames(); ++f)
    for (int s = 0; s < tight.sensors(); ++s)
      EXPECT_LT((tight.acc(f, s) - loose.track.acc(f, s)).norm(), 1e-6);
  EXPECT_EQ(loose.degenerate_frames, 0);
}

TEST(ImuSimTest, GammaZeroIsNearlyTight) {
  const PoseSequence pose = Motion(300);
  GarmentProxy g;
  g.gamma = 0.0;
  const SensorTrack tight = SimulateTight(pose, SixSensorSet());
  const auto loose = SimulateLoose(pose, SixSensorSet(), g, 2);
  EXPECT_LT(MeanOffset(tight, loose.track), 5.0);
}

TEST(ImuSimTest, MeanOffsetIsMonotoneInGamma) {
  const PoseSequence pose = Motion(1800);
  const SensorTrack tight = SimulateTight(pose, SixSensorSet());
  double previous = -1.0;
  for (double gamma : {0.0, 5.0, 10.0, 15.0, 20.0, 24.0}) {
    GarmentProxy g;
    g.gamma = gamma;
    const double offset = MeanOffset(tight, SimulateLoose(pose, SixSensorSet(), g, 3).track);
    EXPECT_GT(offset, previous) << "gamma " << gamma;
    previous = offset;
  }
}

TEST(ImuSimTest, StaticPoseHasNoSecondaryMotion) {
  PoseSequence pose(60, 30.0);
  for (int f = 0; f < 60; ++f) pose.root_translation(f) = Vec3(0, 0, 0.93);
  GarmentProxy g;
  g.gamma = 24.0;
  const SensorTrack tight = SimulateTight(pose, SixSensorSet());
  const auto loose = SimulateLoose(pose, SixSensorSet(), g, 4);
  EXPECT_LT(MeanOffset(tight, loose.track), 1e-9);
}

TEST(ImuSimTest, ConstantAccelerationIsRecovered) {
  const double fps = 60.0;
  const Vec3 a(1.5, -0.5, 2.0);
  PoseSequence pose(120, fps);
  for (int f = 0; f < pose.frames(); ++f) {
    const double t = f / fps;
    pose.root_translation(f) = Vec3(0.2, 0.1, 0.9) + 0.5 * a * t * t;
  }
  const SensorTrack tight = SimulateTight(pose, SixSensorSet());
  for (int f = 0; f < pose.frames(); ++f)
    for (int s = 0; s < tight.sensors(); ++s)
      EXPECT_LT((tight.acc(f, s) - a).norm(), 1e-3 * kGravity);

  SimulationOptions with_g;
  with_g.add_gravity = true;
  const SensorTrack gravity = SimulateTight(pose, SixSensorSet(), with_g);
  EXPECT_TRUE(gravity.gravity_included());
  EXPECT_NEAR(gravity.acc(10, 0).z() - tight.acc(10, 0).z(), kGravity, 1e-9);
}

TEST(ImuSimTest, FiniteDifferenceMatchesAnalyticSecondDerivative) {
  std::vector<Vec3> pos;
  const double fps = 30.0;
  for (int f = 0; f < 10; ++f) {
    const double t = f / fps;
    pos.emplace_back(t * t, 3 * t, -2 * t * t);
  }
  const auto acc = FiniteDifferenceAcceleration(pos, fps);
  for (const auto& v : acc) EXPECT_LT((v - Vec3(2, 0, -4)).norm(), 1e-9);
  EXPECT_THROW(FiniteDifferenceAcceleration({Vec3::Zero(), Vec3::Zero()}, fps),
               SequenceLengthError);
}

TEST(ImuSimTest, DeterministicPerSeed) {
  const PoseSequence pose = Motion(200);
  GarmentProxy g;
  g.gamma = 15.0;
  const auto a = SimulateLoose(pose, SixSensorSet(), g, 9);
  const auto b = SimulateLoose(pose, SixSensorSet(), g, 9);
  const auto c = SimulateLoose(pose, SixSensorSet(), g, 10);
  EXPECT_EQ(a.track.acc(100, 0), b.track.acc(100, 0));
  EXPECT_NE(a.track.acc(100, 0), c.track.acc(100, 0));
}

TEST(ImuSimTest, InputValidation) {
  EXPECT_THROW(SimulateTight(Motion(4), SixSensorSet()), SequenceLengthError);
  auto dup = SixSensorSet();
  dup[1].sensor_id = dup[0].sensor_id;
  EXPECT_THROW(ValidatePlacements(dup), ValidationError);
  auto bad = SixSensorSet();
  bad[0].attach_joint = 24;
  EXPECT_THROW(ValidatePlacements(bad), ValidationError);
  GarmentProxy g;
  g.gamma = 30.0;
  EXPECT_THROW(g.Validate(), ValidationError);
  EXPECT_THROW(SimulateLoose(Motion(20), SixSensorSet(), g, 0), ValidationError);
}

TEST(ImuSimTest, GarmentGridHasSevenConfigurations) {
  const auto grid = DefaultGarmentGrid();
  ASSERT_EQ(grid.size(), 7u);
  EXPECT_DOUBLE_EQ(grid[6].height_cm, 160.0);
  EXPECT_DOUBLE_EQ(grid[6].bmi, 30.0);
  for (const auto& g : grid) EXPECT_NO_THROW(g.Validate());
}

TEST(ImuSimTest, TightnessStringsRoundTrip) {
  for (auto t : {Tightness::kTight, Tightness::kLooseSim, Tightness::kLooseGenerated,
                 Tightness::kLooseBlended, Tightness::kReal}) {
    EXPECT_EQ(TightnessFromString(ToString(t)), t);
  }
}

// A provider that collapses the patch to a point every other frame.
class CollapsingProvider : public GarmentDisplacementProvider {
 public:
  PatchTrajectory Displace(const PatchTrajectory& anchors, double,
                           uint64_t) const override {
    PatchTrajectory out = anchors;
    for (size_t f = 1; f < out.size(); f += 2) out[f].fill(out[f][0]);
    return out;
  }
  double PatchScale() const override { return 0.05; }
};

TEST(ImuSimTest, DegenerateFramesFallBackToPreviousOrientation) {
  const PoseSequence pose = Motion(20);
  const auto loose = SimulateLoose(pose, SixSensorSet(), CollapsingProvider(), 0);
  EXPECT_EQ(loose.degenerate_frames, 10 * 6);
  EXPECT_LT(AngularOffsetDeg(loose.track.ori(1, 0), loose.track.ori(0, 0)), 1e-12);
}

}  // namespace
}  // namespace looseimu
