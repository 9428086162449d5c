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

#include "looseimu/diffusion.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

TEST(NoiseScheduleTest, CosineEndpointsAndMonotonicity) {
  const auto s = NoiseSchedule::Make(1000, ScheduleKind::kCosine);
  EXPECT_DOUBLE_EQ(s.alpha(0), 1.0);
  EXPECT_LT(s.alpha(1000), 1e-6);
  for (int t = 1; t <= 1000; ++t) EXPECT_LE(s.alpha(t), s.alpha(t - 1));
  // Independent evaluation of the squared-cosine curve at the midpoint.
  const double off = 0.008;
  const double num = std::cos((0.5 + off) / (1 + off) * M_PI / 2);
  const double den = std::cos(off / (1 + off) * M_PI / 2);
  EXPECT_NEAR(s.alpha(500), num * num / (den * den), 1e-12);
  for (int t : {0, 137, 500, 999}) {
    EXPECT_NEAR(s.sqrt_alpha(t) * s.sqrt_alpha(t) +
                    s.sqrt_one_minus_alpha(t) * s.sqrt_one_minus_alpha(t),
                1.0, 1e-12);
  }
}

TEST(NoiseScheduleTest, LinearIsMonotone) {
  const auto s = NoiseSchedule::Make(200, ScheduleKind::kLinear);
  for (int t = 1; t <= 200; ++t) EXPECT_LT(s.alpha(t), s.alpha(t - 1));
  EXPECT_EQ(ScheduleKindFromString(ToString(ScheduleKind::kLinear)),
            ScheduleKind::kLinear);
  EXPECT_THROW(ScheduleKindFromString("sigmoid"), ConfigError);
}

TEST(NoiseScheduleTest, RejectsDegenerateHorizonAndBadSteps) {
  EXPECT_THROW(NoiseSchedule::Make(1, ScheduleKind::kCosine), ConfigError);
  const auto s = NoiseSchedule::Make(10, ScheduleKind::kCosine);
  const Matrix x = Matrix::Zero(2, 2);
  EXPECT_THROW(QSample(x, -1, x, s), StepError);
  EXPECT_THROW(QSample(x, 11, x, s), StepError);
  EXPECT_NO_THROW(QSample(x, 10, x, s));
  EXPECT_THROW(QSample(x, 3, Matrix::Zero(2, 3), s), ShapeError);
}

TEST(QSampleTest, MomentsMatchClosedFormWithinThreeStandardErrors) {
  const auto s = NoiseSchedule::Make(1000, ScheduleKind::kCosine);
  std::mt19937_64 rng(77);
  const int n = 100000;
  const double x0_value = 0.7;
  for (int t : {50, 300, 800}) {
    const Matrix x0 = Matrix::Constant(n, 1, x0_value);
    const Matrix z = QSample(x0, t, GaussianMatrix(n, 1, rng), s);
    const double mean = z.mean();
    const double var = (z.array() - mean).square().sum() / (n - 1);
    const double expected_mean = std::sqrt(s.alpha(t)) * x0_value;
    const double expected_var = 1.0 - s.alpha(t);
    EXPECT_NEAR(mean, expected_mean, 3.0 * std::sqrt(expected_var / n)) << t;
    EXPECT_NEAR(var, expected_var, 3.0 * expected_var * std::sqrt(2.0 / (n - 1)))
        << t;
  }
}

TEST(QSampleTest, StepZeroIsIdentity) {
  const auto s = NoiseSchedule::Make(100, ScheduleKind::kCosine);
  std::mt19937_64 rng(1);
  const Matrix x0 = GaussianMatrix(4, 3, rng);
  EXPECT_EQ(QSample(x0, 0, GaussianMatrix(4, 3, rng), s), x0);
}

TEST(PosteriorTest, PreservesMarginals) {
  const auto s = NoiseSchedule::Make(1000, ScheduleKind::kCosine);
  for (auto [t, u] : std::vector<std::pair<int, int>>{
           {1000, 750}, {750, 500}, {500, 1}, {10, 9}, {999, 0}}) {
    const auto c = Posterior(s, t, u);
    // Mixing q(z_t | x0) through the posterior must give q(z_u | x0).
    EXPECT_NEAR(c.x0_coef + c.z_coef * s.sqrt_alpha(t), s.sqrt_alpha(u), 1e-9);
    EXPECT_NEAR(c.z_coef * c.z_coef * (1 - s.alpha(t)) + c.variance,
                1 - s.alpha(u), 1e-9);
  }
  const auto to_zero = Posterior(s, 500, 0);
  EXPECT_NEAR(to_zero.x0_coef, 1.0, 1e-12);
  EXPECT_NEAR(to_zero.z_coef, 0.0, 1e-12);
  EXPECT_NEAR(to_zero.variance, 0.0, 1e-12);
}

TEST(StridedStepsTest, EvenlySpacedDescending) {
  EXPECT_EQ(StridedSteps(1000, 5), (std::vector<int>{1000, 750, 500, 250, 0}));
  EXPECT_EQ(StridedSteps(3, 10), (std::vector<int>{3, 2, 1, 0}));
  EXPECT_THROW(StridedSteps(1000, 1), ConfigError);
}

class SamplerTest : public ::testing::Test {
 protected:
  NoiseSchedule schedule_ = NoiseSchedule::Make(1000, ScheduleKind::kCosine);
  std::vector<int> steps_ = StridedSteps(1000, 5);
  Matrix target_ = Matrix::Constant(6, 4, -0.25);
};

TEST_F(SamplerTest, PerfectDenoiserRecoversTarget) {
  int calls = 0;
  const DenoiserFn perfect = [&](const Matrix&, int, const Matrix&) {
    ++calls;
    return target_;
  };
  const Matrix out = PSampleLoop(perfect, Matrix(), schedule_, steps_, 3, 6, 4);
  EXPECT_EQ(out, target_);
  EXPECT_EQ(calls, 5);
}

TEST_F(SamplerTest, SameSeedSameSampleDifferentSeedDifferentSample) {
  const DenoiserFn shrink = [](const Matrix& z, int, const Matrix&) {
    return Matrix(0.5 * z);
  };
  const Matrix a = PSampleLoop(shrink, Matrix(), schedule_, steps_, 11, 6, 4);
  const Matrix b = PSampleLoop(shrink, Matrix(), schedule_, steps_, 11, 6, 4);
  const Matrix c = PSampleLoop(shrink, Matrix(), schedule_, steps_, 12, 6, 4);
  EXPECT_EQ(a, b);
  EXPECT_GT((a - c).norm(), 1e-6);
}

TEST_F(SamplerTest, ClampHooksRunAtEveryStep) {
  std::vector<int> estimate_steps, latent_steps;
  SamplerClamp clamp;
  clamp.on_estimate = [&](int t, Matrix& x0) {
    estimate_steps.push_back(t);
    x0.row(0).setConstant(9.0);
  };
  clamp.on_latent = [&](int t, Matrix&, std::mt19937_64&) {
    latent_steps.push_back(t);
  };
  const DenoiserFn zero = [](const Matrix& z, int, const Matrix&) {
    return Matrix(Matrix::Zero(z.rows(), z.cols()));
  };
  const Matrix out =
      PSampleLoop(zero, Matrix(), schedule_, steps_, 5, 6, 4, &clamp);
  EXPECT_EQ(estimate_steps, steps_);
  EXPECT_EQ(latent_steps, (std::vector<int>{750, 500, 250, 0}));
  EXPECT_TRUE((out.row(0).array() == 9.0).all());
  EXPECT_TRUE((out.bottomRows(5).array() == 0.0).all());
}

TEST_F(SamplerTest, ValidatesStepsAndShapes) {
  const DenoiserFn id = [](const Matrix& z, int, const Matrix&) { return z; };
  const std::vector<int> ascending{0, 500};
  const std::vector<int> repeated{500, 500};
  const std::vector<int> outside{1001, 0};
  const std::vector<int> empty;
  EXPECT_THROW(PSampleLoop(id, Matrix(), schedule_, ascending, 0, 2, 2),
               ConfigError);
  EXPECT_THROW(PSampleLoop(id, Matrix(), schedule_, repeated, 0, 2, 2),
               ConfigError);
  EXPECT_THROW(PSampleLoop(id, Matrix(), schedule_, outside, 0, 2, 2), StepError);
  EXPECT_THROW(PSampleLoop(id, Matrix(), schedule_, empty, 0, 2, 2), ConfigError);
  const DenoiserFn wrong = [](const Matrix&, int, const Matrix&) {
    return Matrix(Matrix::Zero(1, 1));
  };
  EXPECT_THROW(PSampleLoop(wrong, Matrix(), schedule_, steps_, 0, 2, 2),
               ShapeError);
}

}  // namespace
}  // namespace looseimu
