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

#ifndef LOOSEIMU_MODEL_H_
#define LOOSEIMU_MODEL_H_

#include <cstdint>
#include <span>
#include <string>

#include "looseimu/denoiser.h"
#include "looseimu/diffusion.h"
#include "looseimu/features.h"

namespace looseimu {

enum class Profile { kTiny, kFull };
std::string ToString(Profile p);
Profile ProfileFromString(const std::string& s);

DenoiserConfig DenoiserConfigFor(const FeatureLayout& layout, Profile profile,
                                 int window_frames);

// A denoiser bundled with everything needed to run it on raw channels.
// The network works in normalized space.
class DiffusionModel {
 public:
  DiffusionModel() = default;
  DiffusionModel(FeatureLayout layout, const DenoiserConfig& config,
                 NoiseSchedule schedule, Normalizer target_norm,
                 Normalizer observation_norm, uint64_t init_seed);

  const FeatureLayout& layout() const { return layout_; }
  const Denoiser& denoiser() const { return denoiser_; }
  Denoiser& denoiser() { return denoiser_; }
  const NoiseSchedule& schedule() const { return schedule_; }
  const Normalizer& target_norm() const { return target_norm_; }
  const Normalizer& observation_norm() const { return observation_norm_; }
  int window() const { return denoiser_.config().window_frames; }

  // Network condition from raw observations (rows = B*N). For the
  // inpainting model `loose_mask` (rows x loose width, 1 = hidden) defaults
  // to the root-sensor mask.
  Matrix NetworkCondition(const Matrix& raw_observation,
                          const Matrix* loose_mask = nullptr) const;

  // Single-window denoiser over normalized latents.
  DenoiserFn AsDenoiserFn() const;

  // Samples one window; returns the normalized x0 estimate.
  Matrix SampleNormalized(const Matrix& raw_observation,
                          std::span<const int> steps, uint64_t seed,
                          const SamplerClamp* clamp = nullptr,
                          const Matrix* loose_mask = nullptr) const;
  Matrix Sample(const Matrix& raw_observation, std::span<const int> steps,
                uint64_t seed) const;

 private:
  FeatureLayout layout_;
  Denoiser denoiser_;
  NoiseSchedule schedule_ = NoiseSchedule::Make(1000, ScheduleKind::kCosine);
  Normalizer target_norm_;
  Normalizer observation_norm_;
};

}  // namespace looseimu

#endif  // LOOSEIMU_MODEL_H_
