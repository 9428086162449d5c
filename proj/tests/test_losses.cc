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

#include "looseimu/losses.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "looseimu/diffusion.h"
#include "looseimu/errors.h"
#include "oracles.h"

namespace looseimu {
namespace {

using testing::LoopL1;
using testing::LoopL1Cols;

Matrix Random(int rows, int cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return GaussianMatrix(rows, cols, rng);
}

double Dot(const LossBreakdown& b) {
  double total = 0.0;
  for (const auto& t : b.terms) total += t.weight * t.value;
  return total;
}

TEST(SecondaryLossTest, ExamplesAndLoopOracle) {
  const Matrix truth = Random(60, 54, 1);
  EXPECT_EQ(SecondaryLoss(truth, truth), 0.0);
  EXPECT_NEAR(SecondaryLoss(truth, Matrix(truth.array() + 1.0)), 1.0, 1e-12);
  const Matrix pred = Random(60, 54, 2);
  EXPECT_NEAR(SecondaryLoss(truth, pred), LoopL1(pred, truth), 1e-7);
  EXPECT_THROW(SecondaryLoss(truth, Random(60, 53, 3)), ShapeError);
}

class PoseLossTest : public ::testing::TestWithParam<BodySet> {
 protected:
  FeatureLayout layout_ = FeatureLayout::Make(ModelKind::kConditional, GetParam());
  Matrix target_ = Random(60, layout_.target_width, 10);
};

TEST_P(PoseLossTest, IdenticalOutputsGiveZero) {
  const auto b = PoseLoss(target_, target_, layout_, LossWeights(), &target_);
  EXPECT_EQ(b.total, 0.0);
  EXPECT_EQ(b.Value("consistency"), 0.0);
}

TEST_P(PoseLossTest, RootRotationOffsetIsScaledByItsWeight) {
  const double delta = 0.37;
  Matrix pred = target_;
  for (int c : layout_.root_rotation_cols) pred.col(c).array() += delta;
  const auto b = PoseLoss(pred, target_, layout_, LossWeights(), &pred);
  EXPECT_NEAR(b.Value("root_rotation"),
              LoopL1Cols(pred, target_, layout_.root_rotation_cols), 1e-12);
  EXPECT_NEAR(b.total, 2.0 * delta, 1e-12);
  EXPECT_EQ(b.Value("joint_rotation"), 0.0);
}

TEST_P(PoseLossTest, UnitTermsSumToWeightTotal) {
  const Matrix pred = target_.array() + 1.0;
  const Matrix noisy = pred.array() - 1.0;
  const auto b = PoseLoss(pred, target_, layout_, LossWeights(), &noisy);
  for (const auto& t : b.terms) EXPECT_NEAR(t.value, 1.0, 1e-12) << t.name;
  EXPECT_NEAR(b.total, 10.0, 1e-12);
}

TEST_P(PoseLossTest, PerTermLoopOracleAndDecomposition) {
  const Matrix pred = Random(60, layout_.target_width, 11);
  const Matrix noisy = Random(60, layout_.target_width, 12);
  LossWeights w;
  w.joint_rotation = 0.7;
  w.tight = 1.9;
  const auto b = PoseLoss(pred, target_, layout_, w, &noisy);
  EXPECT_NEAR(b.Value("root_rotation"),
              LoopL1Cols(pred, target_, layout_.root_rotation_cols), 1e-9);
  EXPECT_NEAR(b.Value("joint_rotation"),
              LoopL1Cols(pred, target_, layout_.joint_rotation_cols), 1e-9);
  EXPECT_NEAR(b.Value("extremity_position"),
              LoopL1Cols(pred, target_, layout_.extremity_position_cols), 1e-9);
  EXPECT_NEAR(b.Value("other_position"),
              LoopL1Cols(pred, target_, layout_.other_position_cols), 1e-9);
  EXPECT_NEAR(b.Value("tight"), LoopL1Cols(pred, target_, layout_.tight_cols), 1e-9);
  EXPECT_NEAR(b.Value("consistency"), LoopL1(pred, noisy), 1e-9);
  EXPECT_NEAR(b.total, Dot(b), 1e-6);
}

TEST_P(PoseLossTest, GradientMatchesFiniteDifferences) {
  const Matrix pred = Random(8, layout_.target_width, 13);
  const Matrix noisy = Random(8, layout_.target_width, 14);
  const Matrix target = target_.topRows(8);
  Matrix grad = Matrix::Zero(pred.rows(), pred.cols());
  Matrix grad_noisy = Matrix::Zero(pred.rows(), pred.cols());
  PoseLoss(pred, target, layout_, LossWeights(), &noisy, &grad, &grad_noisy);
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> row(0, 7), col(0, layout_.target_width - 1);
  const double eps = 1e-6;
  for (int k = 0; k < 40; ++k) {
    const int r = row(rng), c = col(rng);
    Matrix plus = pred, minus = pred;
    plus(r, c) += eps;
    minus(r, c) -= eps;
    const double fd =
        (PoseLoss(plus, target, layout_, LossWeights(), &noisy).total -
         PoseLoss(minus, target, layout_, LossWeights(), &noisy).total) /
        (2 * eps);
    EXPECT_NEAR(grad(r, c), fd, 1e-6);
    Matrix n_plus = noisy, n_minus = noisy;
    n_plus(r, c) += eps;
    n_minus(r, c) -= eps;
    const double fd_noisy =
        (PoseLoss(pred, target, layout_, LossWeights(), &n_plus).total -
         PoseLoss(pred, target, layout_, LossWeights(), &n_minus).total) /
        (2 * eps);
    EXPECT_NEAR(grad_noisy(r, c), fd_noisy, 1e-6);
  }
}

TEST_P(PoseLossTest, Errors) {
  EXPECT_THROW(PoseLoss(target_, target_, layout_, LossWeights(), nullptr),
               ConfigError);
  LossWeights no_consistency;
  no_consistency.consistency = 0.0;
  EXPECT_NO_THROW(PoseLoss(target_, target_, layout_, no_consistency, nullptr));
  LossWeights negative;
  negative.tight = -1.0;
  EXPECT_THROW(PoseLoss(target_, target_, layout_, negative, &target_), ConfigError);
  const Matrix narrow = target_.leftCols(layout_.target_width - 1);
  EXPECT_THROW(PoseLoss(narrow, narrow, layout_, no_consistency, nullptr),
               ShapeError);
}

INSTANTIATE_TEST_SUITE_P(Bodies, PoseLossTest,
                         ::testing::Values(BodySet::kUpper, BodySet::kWhole));

TEST(LayoutContractTest, JointCountsAndConditionWidths) {
  const auto upper = FeatureLayout::Make(ModelKind::kConditional, BodySet::kUpper);
  const auto whole = FeatureLayout::Make(ModelKind::kConditional, BodySet::kWhole);
  EXPECT_EQ(upper.joints.size(), 14u);
  EXPECT_EQ(whole.joints.size(), 24u);
  EXPECT_EQ(upper.pose.width, 14 * kSixD);
  EXPECT_EQ(whole.pose.width, 24 * kSixD);
  EXPECT_EQ(upper.observation_width, 36);
  EXPECT_EQ(FeatureLayout::Make(ModelKind::kGarmentAware, BodySet::kUpper)
                .observation_width,
            39);
  EXPECT_EQ(whole.observation_width, 54);
}

TEST(ConsistencyConditionTest, NoiseHasScaleThreeTenths) {
  const Matrix clean = Random(1000, 100, 20);
  const Matrix noisy = ConsistencyCondition(clean, uint64_t{21});
  const Matrix d = noisy - clean;
  const double n = static_cast<double>(d.size());
  const double mean = d.mean();
  const double sd = std::sqrt((d.array() - mean).square().sum() / (n - 1));
  // Standard error of a sample std for Gaussian data.
  const double se = kConsistencyNoiseScale / std::sqrt(2.0 * (n - 1));
  EXPECT_NEAR(sd, kConsistencyNoiseScale, 3.0 * se);
  EXPECT_EQ(ConsistencyCondition(clean, uint64_t{21}), noisy);
  EXPECT_EQ(ConsistencyCondition(clean, uint64_t{21}, 0.0), clean);
}

TEST(InpaintMaskTest, Examples) {
  const auto layout = FeatureLayout::Make(ModelKind::kUnconditional, BodySet::kWhole);
  const Matrix x0 = Random(60, layout.loose.width, 30);
  EXPECT_EQ(InpaintMaskApply(x0, Matrix::Zero(1, x0.cols())), x0);
  EXPECT_TRUE(InpaintMaskApply(x0, Matrix::Ones(60, x0.cols())).isZero());

  const Matrix masked = InpaintMaskApply(x0, RootSensorMask(layout, 60));
  std::vector<bool> is_root(x0.cols(), false);
  for (int c : layout.root_sensor_loose_cols) is_root[c - layout.loose.begin] = true;
  EXPECT_EQ(std::count(is_root.begin(), is_root.end(), true), kSensorChannels);
  for (int c = 0; c < x0.cols(); ++c) {
    if (is_root[c]) {
      EXPECT_TRUE(masked.col(c).isZero());
    } else {
      EXPECT_EQ(masked.col(c), x0.col(c));
    }
  }
  Matrix bad = Matrix::Zero(1, x0.cols());
  bad(0, 0) = 0.5;
  EXPECT_THROW(InpaintMaskApply(x0, bad), ValidationError);
  EXPECT_THROW(InpaintMaskApply(x0, Matrix::Zero(2, x0.cols())), ShapeError);
}

TEST(UnconditionalLossTest, AddsLooseReconstructionTerm) {
  const auto layout = FeatureLayout::Make(ModelKind::kUnconditional, BodySet::kWhole);
  const Matrix target = Random(60, layout.target_width, 40);
  const Matrix mask = RootSensorMask(layout, 60);
  const auto zero = UnconditionalLoss(target, target, layout, LossWeights(), mask,
                                      &target);
  EXPECT_EQ(zero.total, 0.0);

  const Matrix pred = target.array() + 1.0;
  const Matrix noisy = pred.array() - 1.0;
  const auto unit =
      UnconditionalLoss(pred, target, layout, LossWeights(), mask, &noisy);
  EXPECT_NEAR(unit.Value("loose_recon"), 1.0, 1e-12);
  EXPECT_NEAR(unit.total, 11.0, 1e-12);

  const Matrix random = Random(60, layout.target_width, 41);
  const auto b = UnconditionalLoss(random, target, layout, LossWeights(), mask,
                                   &random);
  EXPECT_NEAR(b.Value("loose_recon"),
              LoopL1Cols(random, target, layout.root_sensor_loose_cols), 1e-9);
  EXPECT_NEAR(b.total, Dot(b), 1e-6);

  const auto conditional = FeatureLayout::Make(ModelKind::kConditional, BodySet::kWhole);
  EXPECT_THROW(UnconditionalLoss(target, target, conditional, LossWeights(), mask,
                                 &target),
               ConfigError);
}

// Binomial expansion of the order-k, gap-g forward difference.
double LoopDifferenceL1(const Matrix& pred, const Matrix& target, int begin,
                        int width, int window, int gap, int order) {
  static const int kBinomial[4][4] = {{1}, {1, 1}, {1, 2, 1}, {1, 3, 3, 1}};
  double sum = 0.0;
  int count = 0;
  for (int w = 0; w < pred.rows() / window; ++w) {
    for (int i = 0; i + order * gap < window; ++i) {
      for (int c = begin; c < begin + width; ++c) {
        double d = 0.0;
        for (int j = 0; j <= order; ++j) {
          const int r = w * window + i + j * gap;
          const double sign = ((order - j) % 2 == 0) ? 1.0 : -1.0;
          d += sign * kBinomial[order][j] * (pred(r, c) - target(r, c));
        }
        sum += std::abs(d);
        ++count;
      }
    }
  }
  return sum / count;
}

class AblationLossTest : public ::testing::Test {
 protected:
  FeatureLayout layout_ = FeatureLayout::Make(ModelKind::kPoseOnly, BodySet::kUpper);
  int window_ = 20;
};

TEST_F(AblationLossTest, RandomPairMatchesLoopOracle) {
  const Matrix pred = Random(2 * window_, layout_.target_width, 50);
  const Matrix target = Random(2 * window_, layout_.target_width, 51);
  const auto b =
      PoseOnlyAblationLoss(pred, target, layout_, AblationWeights(), window_);
  const char* names[] = {"velocity", "acceleration", "jerk"};
  for (int order = 1; order <= 3; ++order) {
    for (int gap : AblationWeights::kGaps) {
      const std::string name =
          std::string("rotation_") + names[order - 1] + "_" + std::to_string(gap);
      EXPECT_NEAR(b.Value(name),
                  LoopDifferenceL1(pred, target, layout_.pose.begin,
                                   layout_.pose.width, window_, gap, order),
                  1e-6)
          << name;
    }
  }
  for (int gap : AblationWeights::kGaps) {
    EXPECT_NEAR(b.Value("position_velocity_" + std::to_string(gap)),
                LoopDifferenceL1(pred, target, layout_.positions.begin,
                                 layout_.positions.width, window_, gap, 1),
                1e-6);
  }
  EXPECT_NEAR(b.total, Dot(b), 1e-6);
}

TEST_F(AblationLossTest, ConstantAndLinearSequences) {
  const int rows = window_;
  const Matrix target = Matrix::Zero(rows, layout_.target_width);
  const Matrix constant = Matrix::Constant(rows, layout_.target_width, 0.4);
  auto b = PoseOnlyAblationLoss(constant, target, layout_, AblationWeights(), window_);
  for (const auto& t : b.terms) {
    if (t.name != "pose") EXPECT_NEAR(t.value, 0.0, 1e-12) << t.name;
  }
  Matrix linear(rows, layout_.target_width);
  for (int r = 0; r < rows; ++r) linear.row(r).setConstant(0.1 * r);
  b = PoseOnlyAblationLoss(linear, target, layout_, AblationWeights(), window_);
  for (int gap : AblationWeights::kGaps) {
    const std::string g = std::to_string(gap);
    EXPECT_NEAR(b.Value("rotation_velocity_" + g), 0.1 * gap, 1e-9);
    EXPECT_NEAR(b.Value("rotation_acceleration_" + g), 0.0, 1e-9);
    EXPECT_NEAR(b.Value("rotation_jerk_" + g), 0.0, 1e-9);
  }
}

TEST_F(AblationLossTest, PoseOnlyWeightsReduceToPlainPoseL1) {
  const Matrix pred = Random(window_, layout_.target_width, 52);
  const Matrix target = Random(window_, layout_.target_width, 53);
  std::vector<int> pose_cols;
  for (int c = layout_.pose.begin; c < layout_.pose.end(); ++c) pose_cols.push_back(c);
  const auto b = PoseOnlyAblationLoss(pred, target, layout_,
                                      AblationWeights::PoseOnly(), window_);
  EXPECT_NEAR(b.total, LoopL1Cols(pred, target, pose_cols), 1e-9);
}

TEST_F(AblationLossTest, GradientMatchesFiniteDifferences) {
  const Matrix pred = Random(window_, layout_.target_width, 54);
  const Matrix target = Random(window_, layout_.target_width, 55);
  Matrix grad = Matrix::Zero(pred.rows(), pred.cols());
  PoseOnlyAblationLoss(pred, target, layout_, AblationWeights(), window_, &grad);
  std::mt19937_64 rng(56);
  std::uniform_int_distribution<int> row(0, window_ - 1),
      col(0, layout_.target_width - 1);
  const double eps = 1e-7;
  for (int k = 0; k < 40; ++k) {
    const int r = row(rng), c = col(rng);
    Matrix plus = pred, minus = pred;
    plus(r, c) += eps;
    minus(r, c) -= eps;
    const double fd =
        (PoseOnlyAblationLoss(plus, target, layout_, AblationWeights(), window_).total -
         PoseOnlyAblationLoss(minus, target, layout_, AblationWeights(), window_)
             .total) /
        (2 * eps);
    EXPECT_NEAR(grad(r, c), fd, 1e-5);
  }
}

TEST_F(AblationLossTest, RejectsShortWindows) {
  const Matrix m = Matrix::Zero(10, layout_.target_width);
  EXPECT_THROW(PoseOnlyAblationLoss(m, m, layout_, AblationWeights(), 10),
               SequenceLengthError);
  const Matrix ragged = Matrix::Zero(30, layout_.target_width);
  EXPECT_THROW(PoseOnlyAblationLoss(ragged, ragged, layout_, AblationWeights(), 20),
               ShapeError);
}

}  // namespace
}  // namespace looseimu
