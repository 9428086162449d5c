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

#ifndef LOOSEIMU_DIFFUSION_H_
#define LOOSEIMU_DIFFUSION_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "looseimu/tensor.h"

namespace looseimu {

enum class ScheduleKind { kCosine, kLinear };
std::string ToString(ScheduleKind kind);
ScheduleKind ScheduleKindFromString(const std::string& s);

// alpha(t) is the cumulative signal coefficient: q(z_t | x0) has mean
// sqrt(alpha_t) x0 and variance 1 - alpha_t. Indexed 0..T inclusive.
class NoiseSchedule {
 public:
  // Throws ConfigError if T < 2.
  static NoiseSchedule Make(int T, ScheduleKind kind);

  int T() const { return T_; }
  ScheduleKind kind() const { return kind_; }
  double alpha(int t) const { return alpha_.at(t); }
  double sqrt_alpha(int t) const { return sqrt_alpha_.at(t); }
  double sqrt_one_minus_alpha(int t) const {
    return sqrt_one_minus_alpha_.at(t);
  }
  void CheckStep(int t) const;

 private:
  int T_ = 0;
  ScheduleKind kind_ = ScheduleKind::kCosine;
  std::vector<double> alpha_;
  std::vector<double> sqrt_alpha_;
  std::vector<double> sqrt_one_minus_alpha_;
};

// Closed-form cosine schedule value, offset s = 0.008.
double CosineAlpha(double t_over_T);

Matrix QSample(const Matrix& x0, int t, const Matrix& noise,
               const NoiseSchedule& schedule);

Matrix GaussianMatrix(int rows, int cols, std::mt19937_64& rng);

// Predicts x0 from (z_t, t, condition).
using DenoiserFn =
    std::function<Matrix(const Matrix& z_t, int t, const Matrix& condition)>;

// Inpainting hooks. `on_estimate` sees every x0 estimate before it enters
// the posterior (and before it is returned at the final step);
// `on_latent` sees every newly drawn latent z_{t_next}.
struct SamplerClamp {
  std::function<void(int t, Matrix& x0_hat)> on_estimate;
  std::function<void(int t_next, Matrix& z_next, std::mt19937_64& rng)>
      on_latent;
};

// Evenly spaced descending steps from T to 0 inclusive.
std::vector<int> StridedSteps(int T, int count);

// Ancestral x0-parameterized sampling over `steps` (strictly descending,
// each in [0, T]). Returns the final x0 estimate.
Matrix PSampleLoop(const DenoiserFn& denoiser, const Matrix& condition,
                   const NoiseSchedule& schedule, std::span<const int> steps,
                   uint64_t seed, int rows, int cols,
                   const SamplerClamp* clamp = nullptr);

struct PosteriorCoefficients {
  double x0_coef;
  double z_coef;
  double variance;
};
// q(z_s | z_t, x0) for s < t under the cumulative-alpha convention.
PosteriorCoefficients Posterior(const NoiseSchedule& schedule, int t, int s);

}  // namespace looseimu

#endif  // LOOSEIMU_DIFFUSION_H_
