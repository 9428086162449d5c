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

#ifndef LOOSEIMU_LOSSES_H_
#define LOOSEIMU_LOSSES_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "looseimu/features.h"
#include "looseimu/tensor.h"

namespace looseimu {

// Coefficients of the composite pose objective. `extremity_position` is
// the arm weight for the upper body and the arm+leg weight for the whole
// body.
struct LossWeights {
  double root_rotation = 2.0;
  double joint_rotation = 1.0;
  double extremity_position = 2.0;
  double other_position = 1.0;
  double tight = 1.0;
  double consistency = 3.0;
  // Only used by the inpainting model.
  double loose_recon = 1.0;

  void Validate() const;
};

struct LossTerm {
  std::string name;
  double weight = 0.0;
  double value = 0.0;
};

struct LossBreakdown {
  std::vector<LossTerm> terms;
  double total = 0.0;

  // Throws ConfigError for an unknown name.
  double Value(const std::string& name) const;
};

// Mean absolute error over all elements.
double SecondaryLoss(const Matrix& truth, const Matrix& pred,
                     Matrix* grad_pred = nullptr);

// Weighted sum of L1 terms over the layout's column groups. `noisy_pred` is
// the model output under the noise-perturbed condition; it is required when
// the consistency weight is positive. Gradients are accumulated (+=) when
// the output pointers are non-null.
LossBreakdown PoseLoss(const Matrix& pred, const Matrix& target,
                       const FeatureLayout& layout, const LossWeights& weights,
                       const Matrix* noisy_pred, Matrix* grad_pred = nullptr,
                       Matrix* grad_noisy = nullptr);

inline constexpr double kConsistencyNoiseScale = 0.3;

// condition + scale * N(0, I).
Matrix ConsistencyCondition(const Matrix& condition, std::mt19937_64& rng,
                            double scale = kConsistencyNoiseScale);
Matrix ConsistencyCondition(const Matrix& condition, uint64_t seed,
                            double scale = kConsistencyNoiseScale);

// (1 - mask) * x0. Throws ValidationError for non-binary masks and
// ShapeError when the mask is neither x0-shaped nor a single row.
Matrix InpaintMaskApply(const Matrix& x0, const Matrix& mask);

// rows x loose-width mask selecting the root sensor's loose channels.
Matrix RootSensorMask(const FeatureLayout& layout, int rows);

// PoseLoss terms plus L1 over the masked loose channels. `loose_mask` is
// rows x loose-width.
LossBreakdown UnconditionalLoss(const Matrix& pred, const Matrix& target,
                                const FeatureLayout& layout,
                                const LossWeights& weights,
                                const Matrix& loose_mask,
                                const Matrix* noisy_pred,
                                Matrix* grad_pred = nullptr,
                                Matrix* grad_noisy = nullptr);

// Finite-difference smoothness terms for the pose-only ablation:
// differences of order 1..3 at frame gaps {1, 3, 5} on rotation channels,
// and first differences at the same gaps on position channels.
struct AblationWeights {
  static constexpr std::array<int, 3> kGaps = {1, 3, 5};
  double pose = 1.0;
  std::array<std::array<double, 3>, 3> rotation_diff = {
      {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}}};  // [order][gap]
  std::array<double, 3> position_velocity = {1.0, 1.0, 1.0};

  static AblationWeights PoseOnly();  // all difference weights zero
};

inline constexpr int kAblationMinFrames = 16;

// `pred`/`target` hold whole windows of `window_frames` rows each.
LossBreakdown PoseOnlyAblationLoss(const Matrix& pred, const Matrix& target,
                                   const FeatureLayout& layout,
                                   const AblationWeights& weights,
                                   int window_frames,
                                   Matrix* grad_pred = nullptr);

}  // namespace looseimu

#endif  // LOOSEIMU_LOSSES_H_
