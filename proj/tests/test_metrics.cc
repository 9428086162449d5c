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

#include "looseimu/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "looseimu/diffusion.h"
#include "looseimu/errors.h"
#include "looseimu/motion_gen.h"
#include "oracles.h"

namespace looseimu {
namespace {

using testing::QuaternionDotAngleDeg;
using testing::RandomRotation;

GlobalSequence RandomGlobal(int frames, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  GlobalSequence g;
  g.frames = frames;
  for (int i = 0; i < frames * kJointCount; ++i) {
    g.rotation.push_back(RandomRotation(rng));
    g.position.emplace_back(n(rng), n(rng), n(rng));
  }
  return g;
}

std::vector<int> AllJoints() { return EvaluationJoints(BodySet::kWhole); }

TEST(MpjreTest, ZeroForIdenticalAndFixedOffset) {
  const GlobalSequence gt = RandomGlobal(20, 1);
  EXPECT_NEAR(Mpjre(gt, gt, AllJoints()).mean, 0.0, 1e-9);
  GlobalSequence pred = gt;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& r : pred.rotation)
    r = r * Rotation::About(Vec3(n(rng), n(rng), n(rng)).normalized(), 10.0 * M_PI / 180);
  const MetricStat s = Mpjre(pred, gt, AllJoints());
  EXPECT_NEAR(s.mean, 10.0, 1e-9);
  EXPECT_NEAR(s.std, 0.0, 1e-9);
}

TEST(MpjreTest, RandomMatchesDoubleLoopOracle) {
  const GlobalSequence a = RandomGlobal(15, 3), b = RandomGlobal(15, 4);
  const auto joints = EvaluationJoints(BodySet::kUpper);
  ASSERT_EQ(joints.size(), 11u);
  std::vector<double> per_frame;
  for (int f = 0; f < 15; ++f) {
    double s = 0.0;
    for (int j : joints)
      s += QuaternionDotAngleDeg(a.rotation[f * 24 + j], b.rotation[f * 24 + j]);
    per_frame.push_back(s / joints.size());
  }
  double mean = 0.0;
  for (double v : per_frame) mean += v / per_frame.size();
  double var = 0.0;
  for (double v : per_frame) var += (v - mean) * (v - mean) / per_frame.size();
  const MetricStat s = Mpjre(a, b, joints);
  EXPECT_NEAR(s.mean, mean, 1e-6);
  EXPECT_NEAR(s.std, std::sqrt(var), 1e-6);
}

TEST(MpjreTest, InvariantToSharedGlobalRotation) {
  const GlobalSequence a = RandomGlobal(10, 5), b = RandomGlobal(10, 6);
  std::mt19937_64 rng(7);
  const Rotation g = RandomRotation(rng);
  GlobalSequence ra = a, rb = b;
  for (auto& r : ra.rotation) r = g * r;
  for (auto& r : rb.rotation) r = g * r;
  EXPECT_NEAR(Mpjre(ra, rb, AllJoints()).mean, Mpjre(a, b, AllJoints()).mean, 1e-6);
}

TEST(MpjreTest, LocalFrameFlagAndMisalignment) {
  const PoseSequence a = GenerateMotion(30, 1).pose;
  PoseSequence b = a;
  for (int f = 0; f < 30; ++f) b.rotation(f, 0) = b.rotation(f, 0) * Rotation::About(Vec3::UnitZ(), 0.2);
  const auto joints = AllJoints();
  // A root offset moves every global rotation but only one local rotation.
  EXPECT_NEAR(Mpjre(a, b, joints, RotationFrame::kGlobal).mean, 0.2 * 180 / M_PI, 1e-6);
  EXPECT_NEAR(Mpjre(a, b, joints, RotationFrame::kLocal).mean, 0.2 * 180 / M_PI / 24,
              1e-6);
  EXPECT_THROW(Mpjre(RandomGlobal(3, 1), RandomGlobal(4, 1), joints), ShapeError);
  EXPECT_THROW(Mpjre(RandomGlobal(3, 1), RandomGlobal(3, 1), {}), ValidationError);
}

TEST(MpjpeTest, RootAlignmentRemovesGlobalOffset) {
  const GlobalSequence gt = RandomGlobal(12, 8);
  EXPECT_EQ(Mpjpe(gt, gt, AllJoints()).mean, 0.0);
  GlobalSequence shifted = gt;
  for (auto& p : shifted.position) p += Vec3(0.01, 0.0, 0.0);
  EXPECT_NEAR(Mpjpe(shifted, gt, AllJoints()).mean, 0.0, 1e-12);
}

TEST(MpjpeTest, RandomMatchesLoopOracle) {
  const GlobalSequence a = RandomGlobal(9, 9), b = RandomGlobal(9, 10);
  const auto joints = AllJoints();
  double total = 0.0;
  for (int f = 0; f < 9; ++f) {
    double s = 0.0;
    for (int j : joints) {
      const Vec3 pa = a.position[f * 24 + j] - a.position[f * 24];
      const Vec3 pb = b.position[f * 24 + j] - b.position[f * 24];
      s += std::sqrt((pa - pb).squaredNorm());
    }
    total += 100.0 * s / joints.size();
  }
  EXPECT_NEAR(Mpjpe(a, b, joints).mean, total / 9, 1e-6);
}

TEST(MpjveTest, ExamplesAndOracle) {
  GlobalSequence still;
  still.frames = 5;
  still.rotation.assign(5 * 24, Rotation());
  still.position.assign(5 * 24, Vec3::Zero());
  EXPECT_EQ(Mpjve(still, still, AllJoints(), 30.0), 0.0);

  GlobalSequence moving = still;
  for (int f = 0; f < 5; ++f)
    for (int j = 1; j < 24; ++j) moving.position[f * 24 + j] = Vec3(0.01 * f, 0, 0);
  // The root does not move, so every non-root joint drifts 1 cm per frame.
  EXPECT_NEAR(Mpjve(moving, still, {5}, 30.0), 30.0, 1e-9);

  const GlobalSequence a = RandomGlobal(8, 11), b = RandomGlobal(8, 12);
  double sum = 0.0;
  int count = 0;
  for (int f = 1; f < 8; ++f) {
    for (int j = 0; j < 24; ++j) {
      auto rel = [&](const GlobalSequence& g, int ff) {
        return g.position[ff * 24 + j] - g.position[ff * 24];
      };
      sum += ((rel(a, f) - rel(a, f - 1)) - (rel(b, f) - rel(b, f - 1))).norm();
      ++count;
    }
  }
  EXPECT_NEAR(Mpjve(a, b, AllJoints(), 60.0), sum / count * 60.0 * 100.0, 1e-6);
  still.frames = 1;
  EXPECT_THROW(Mpjve(still, still, AllJoints(), 30.0), SequenceLengthError);
}

TEST(JitterTest, LinearIsZeroAndCubicMatchesAnalyticJerk) {
  const double fps = 30.0;
  Matrix linear(50, 3), cubic(50, 3);
  for (int f = 0; f < 50; ++f) {
    const double t = f / fps;
    linear.row(f) << 2 * t, -t, 0.5;
    cubic.row(f) << t * t * t, 0, 0;
  }
  EXPECT_NEAR(Jitter(linear, fps), 0.0, 1e-9);
  // d^3/dt^3 t^3 = 6 m/s^3 = 0.06 in units of 10^2 m/s^3.
  EXPECT_NEAR(Jitter(cubic, fps), 0.06, 1e-3);
  EXPECT_THROW(Jitter(Matrix::Zero(3, 3), fps), SequenceLengthError);
  EXPECT_THROW(Jitter(Matrix::Zero(5, 4), fps), ShapeError);
}

TEST(JitterTest, RandomMatchesLoopOracle) {
  std::mt19937_64 rng(13);
  const Matrix p = GaussianMatrix(20, 6, rng);
  double sum = 0.0;
  for (int f = 3; f < 20; ++f) {
    for (int j = 0; j < 2; ++j) {
      double sq = 0.0;
      for (int c = 0; c < 3; ++c) {
        const int k = 3 * j + c;
        const double d = p(f, k) - 3 * p(f - 1, k) + 3 * p(f - 2, k) - p(f - 3, k);
        sq += d * d;
      }
      sum += std::sqrt(sq);
    }
  }
  EXPECT_NEAR(Jitter(p, 30.0), sum / (17 * 2) * 27000.0 / 100.0, 1e-6);
}

TEST(DropoutTest, Examples) {
  std::mt19937_64 rng(14);
  const Matrix obs = GaussianMatrix(10, 6 * 9 + 3, rng);
  const DropoutResult none = ApplySensorDropout(obs, 6, 0, DropoutPolicy::kZero, 1);
  EXPECT_EQ(none.observation, obs);
  EXPECT_TRUE(none.dropped.empty());

  const DropoutResult all = ApplySensorDropout(obs, 6, 6, DropoutPolicy::kZero, 1);
  EXPECT_TRUE(all.observation.leftCols(54).isZero());
  EXPECT_EQ(all.observation.rightCols(3), obs.rightCols(3));

  const auto a = ApplySensorDropout(obs, 6, 1, DropoutPolicy::kZero, 99);
  const auto b = ApplySensorDropout(obs, 6, 1, DropoutPolicy::kZero, 99);
  EXPECT_EQ(a.dropped, b.dropped);
  ASSERT_EQ(a.dropped.size(), 1u);

  const auto frozen = ApplySensorDropout(obs, 6, 2, DropoutPolicy::kFreeze, 5);
  for (int s : frozen.dropped)
    for (int f = 0; f < 10; ++f)
      EXPECT_EQ(frozen.observation.block(f, 9 * s, 1, 9), obs.block(0, 9 * s, 1, 9));

  EXPECT_THROW(ApplySensorDropout(obs, 6, 7, DropoutPolicy::kZero, 0), ValidationError);
  EXPECT_THROW(ApplySensorDropout(obs, 6, -1, DropoutPolicy::kZero, 0), ValidationError);
  EXPECT_EQ(DropoutPolicyFromString("freeze"), DropoutPolicy::kFreeze);
}

TEST(EvaluateTest, ReportIsFiniteNonNegativeAndSerializes) {
  const PoseSequence gt = GenerateMotion(90, 3).pose;
  const PoseSequence pred = GenerateMotion(90, 4).pose;
  const EvalReport self = Evaluate(gt, gt, BodySet::kWhole);
  EXPECT_NEAR(self.mpjre_deg.mean, 0.0, 1e-6);
  EXPECT_NEAR(self.mpjpe_cm.mean, 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(self.jitter, self.gt_jitter);

  const EvalReport r = Evaluate(pred, gt, BodySet::kUpper);
  for (double v : {r.mpjre_deg.mean, r.mpjre_deg.std, r.mpjpe_cm.mean, r.mpjve_cm_s,
                   r.jitter, r.gt_jitter, r.root_angle_error_deg}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GE(v, 0.0);
  }
  EXPECT_GT(r.mpjre_deg.mean, 0.0);
  EXPECT_EQ(r.per_joint.size(), 11u);
  EXPECT_EQ(r.joint_set, "upper11");
  const auto j = r.ToJson();
  EXPECT_EQ(j.at("protocol").at("alignment"), "root_translation");
  EXPECT_DOUBLE_EQ(j.at("mpjpe_cm").at("mean").get<double>(), r.mpjpe_cm.mean);
  EXPECT_EQ(r.ToCsv().rfind("metric,value\n", 0), 0u);
}

TEST(EvaluateTest, AverageIsFrameWeighted) {
  const PoseSequence gt = GenerateMotion(120, 3).pose;
  const EvalReport a = Evaluate(GenerateMotion(120, 5).pose, gt, BodySet::kWhole);
  const EvalReport b = Evaluate(gt.Slice(0, 40), gt.Slice(0, 40), BodySet::kWhole);
  const EvalReport avg = AverageReports({a, b});
  EXPECT_EQ(avg.frames, 160);
  EXPECT_NEAR(avg.mpjpe_cm.mean, (120 * a.mpjpe_cm.mean + 40 * b.mpjpe_cm.mean) / 160, 1e-12);
  EXPECT_NEAR(avg.per_joint[3].rotation_deg, 0.75 * a.per_joint[3].rotation_deg, 1e-5);
  EXPECT_EQ(AverageReports({}).frames, 0);
}

TEST(BaselineTest, MeanPoseOfConstantSequenceIsThatPose) {
  const PoseSequence seq = GenerateMotion(40, 6).pose;
  std::vector<Rotation> local(kJointCount);
  for (int j = 0; j < kJointCount; ++j) local[j] = seq.rotation(7, j);
  const PoseSequence constant = ConstantPose(local, 25, 30.0);
  EXPECT_EQ(constant.frames(), 25);
  const auto mean = MeanLocalPose({&constant});
  for (int j = 0; j < kJointCount; ++j)
    EXPECT_LT(AngularOffsetDeg(mean[j], local[j]), 1e-6);
}

}  // namespace
}  // namespace looseimu
