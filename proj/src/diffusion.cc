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

#include <algorithm>
#include <cmath>

#include "looseimu/errors.h"

namespace looseimu {

std::string ToString(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "linear";
}

ScheduleKind ScheduleKindFromString(const std::string& s) {
  if (s == "cosine") return ScheduleKind::kCosine;
  if (s == "linear") return ScheduleKind::kLinear;
  throw ConfigError("unknown schedule kind: " + s);
}

double CosineAlpha(double u) {
  constexpr double s = 0.008;
  const double f = std::cos((u + s) / (1.0 + s) * M_PI / 2.0);
  const double f0 = std::cos(s / (1.0 + s) * M_PI / 2.0);
  return (f * f) / (f0 * f0);
}

NoiseSchedule NoiseSchedule::Make(int T, ScheduleKind kind) {
  if (T < 2) throw ConfigError("diffusion needs T >= 2, got " + std::to_string(T));
  NoiseSchedule s;
  s.T_ = T;
  s.kind_ = kind;
  s.alpha_.resize(T + 1);
  if (kind == ScheduleKind::kCosine) {
    for (int t = 0; t <= T; ++t) {
      s.alpha_[t] = std::clamp(CosineAlpha(static_cast<double>(t) / T), 0.0, 1.0);
    }
  } else {
    // Betas span [1e-4, 2e-2] at T = 1000, rescaled for other T.
    const double scale = 1000.0 / T;
    const double b0 = 1e-4 * scale;
    const double b1 = std::min(2e-2 * scale, 0.999);
    double prod = 1.0;
    s.alpha_[0] = 1.0;
    for (int t = 1; t <= T; ++t) {
      const double beta = b0 + (b1 - b0) * (t - 1) / std::max(1, T - 1);
      prod *= 1.0 - beta;
      s.alpha_[t] = prod;
    }
  }
  s.alpha_[0] = 1.0;
  for (int t = 1; t <= T; ++t) s.alpha_[t] = std::min(s.alpha_[t], s.alpha_[t - 1]);
  s.sqrt_alpha_.resize(T + 1);
  s.sqrt_one_minus_alpha_.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    s.sqrt_alpha_[t] = std::sqrt(s.alpha_[t]);
    s.sqrt_one_minus_alpha_[t] = std::sqrt(1.0 - s.alpha_[t]);
  }
  return s;
}

void NoiseSchedule::CheckStep(int t) const {
  if (t < 0 || t > T_) {
    throw StepError("diffusion step " + std::to_string(t) + " outside [0, " +
                    std::to_string(T_) + "]");
  }
}

Matrix QSample(const Matrix& x0, int t, const Matrix& noise,
               const NoiseSchedule& schedule) {
  schedule.CheckStep(t);
  if (x0.rows() != noise.rows() || x0.cols() != noise.cols()) {
    throw ShapeError("q_sample: x0 and noise shapes differ");
  }
  return schedule.sqrt_alpha(t) * x0 + schedule.sqrt_one_minus_alpha(t) * noise;
}

Matrix GaussianMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

std::vector<int> StridedSteps(int T, int count) {
  if (count < 2) throw ConfigError("need at least 2 sampling steps");
  std::vector<int> steps(count);
  for (int i = 0; i < count; ++i) {
    steps[i] = static_cast<int>(std::lround(
        static_cast<double>(T) * (count - 1 - i) / (count - 1)));
  }
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

PosteriorCoefficients Posterior(const NoiseSchedule& schedule, int t, int s) {
  const double at = schedule.alpha(t);
  const double as = schedule.alpha(s);
  const double one_minus_at = 1.0 - at;
  if (one_minus_at <= 0.0) return {1.0, 0.0, 0.0};
  const double step_alpha = as > 0.0 ? at / as : 0.0;
  PosteriorCoefficients c;
  c.x0_coef = std::sqrt(as) * (1.0 - step_alpha) / one_minus_at;
  c.z_coef = std::sqrt(step_alpha) * (1.0 - as) / one_minus_at;
  c.variance = std::max(0.0, (1.0 - as) / one_minus_at * (1.0 - step_alpha));
  return c;
}

Matrix PSampleLoop(const DenoiserFn& denoiser, const Matrix& condition,
                   const NoiseSchedule& schedule, std::span<const int> steps,
                   uint64_t seed, int rows, int cols,
                   const SamplerClamp* clamp) {
  if (steps.empty()) throw ConfigError("empty sampling step list");
  for (size_t i = 0; i < steps.size(); ++i) {
    schedule.CheckStep(steps[i]);
    if (i > 0 && steps[i] >= steps[i - 1]) {
      throw ConfigError("sampling steps must be strictly descending");
    }
  }
  std::mt19937_64 rng(seed);
  Matrix z = GaussianMatrix(rows, cols, rng);
  Matrix x0_hat;
  for (size_t i = 0; i < steps.size(); ++i) {
    const int t = steps[i];
    x0_hat = denoiser(z, t, condition);
    if (x0_hat.rows() != rows || x0_hat.cols() != cols) {
      throw ShapeError("denoiser output shape does not match target shape");
    }
    if (clamp && clamp->on_estimate) clamp->on_estimate(t, x0_hat);
    if (i + 1 == steps.size()) break;
    const int t_next = steps[i + 1];
    const PosteriorCoefficients c = Posterior(schedule, t, t_next);
    Matrix z_next = c.x0_coef * x0_hat + c.z_coef * z;
    if (c.variance > 0.0) {
      z_next += std::sqrt(c.variance) * GaussianMatrix(rows, cols, rng);
    }
    if (clamp && clamp->on_latent) clamp->on_latent(t_next, z_next, rng);
    z = std::move(z_next);
  }
  return x0_hat;
}

}  // namespace looseimu
