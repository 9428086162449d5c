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

#include "looseimu/model.h"

#include "looseimu/errors.h"
#include "looseimu/losses.h"

namespace looseimu {

std::string ToString(Profile p) { return p == Profile::kTiny ? "tiny" : "full"; }

Profile ProfileFromString(const std::string& s) {
  if (s == "tiny") return Profile::kTiny;
  if (s == "full") return Profile::kFull;
  throw ConfigError("unknown profile: " + s);
}

DenoiserConfig DenoiserConfigFor(const FeatureLayout& layout, Profile profile,
                                 int window_frames) {
  return profile == Profile::kTiny
             ? DenoiserConfig::Tiny(layout.parts, layout.condition_width,
                                    layout.target_width, window_frames)
             : DenoiserConfig::Full(layout.parts, layout.condition_width,
                                    layout.target_width, window_frames);
}

DiffusionModel::DiffusionModel(FeatureLayout layout,
                               const DenoiserConfig& config,
                               NoiseSchedule schedule, Normalizer target_norm,
                               Normalizer observation_norm, uint64_t init_seed)
    : layout_(std::move(layout)),
      denoiser_(config, init_seed),
      schedule_(std::move(schedule)),
      target_norm_(std::move(target_norm)),
      observation_norm_(std::move(observation_norm)) {
  if (config.output_width != layout_.target_width ||
      config.condition_width != layout_.condition_width) {
    throw ConfigError("denoiser widths do not match the feature layout");
  }
  if (target_norm_.width() != layout_.target_width ||
      observation_norm_.width() != layout_.observation_width) {
    throw ConfigError("normalizer widths do not match the feature layout");
  }
}

Matrix DiffusionModel::NetworkCondition(const Matrix& raw_observation,
                                        const Matrix* loose_mask) const {
  if (raw_observation.cols() != layout_.observation_width) {
    throw ShapeError("observation width " +
                     std::to_string(raw_observation.cols()) + " != " +
                     std::to_string(layout_.observation_width));
  }
  if (layout_.kind != ModelKind::kUnconditional) {
    return observation_norm_.Apply(raw_observation);
  }
  const int lw = layout_.loose.width;
  const Eigen::Index rows = raw_observation.rows();
  Matrix loose_norm = raw_observation.rowwise() -
                      target_norm_.mean.segment(layout_.loose.begin, lw);
  loose_norm = loose_norm.array().rowwise() /
               target_norm_.std.segment(layout_.loose.begin, lw).array();
  const Matrix mask = loose_mask ? *loose_mask
                                 : RootSensorMask(layout_, static_cast<int>(rows));
  Matrix cond(rows, 2 * lw);
  cond.leftCols(lw) = InpaintMaskApply(loose_norm, mask);
  cond.rightCols(lw) = mask;
  return cond;
}

DenoiserFn DiffusionModel::AsDenoiserFn() const {
  return [this](const Matrix& z, int t, const Matrix& condition) {
    const int steps[1] = {t};
    return denoiser_.Forward(z, steps, condition);
  };
}

Matrix DiffusionModel::SampleNormalized(const Matrix& raw_observation,
                                        std::span<const int> steps,
                                        uint64_t seed,
                                        const SamplerClamp* clamp,
                                        const Matrix* loose_mask) const {
  if (raw_observation.rows() != window()) {
    throw ShapeError("observation window must hold " +
                     std::to_string(window()) + " frames");
  }
  const Matrix cond = NetworkCondition(raw_observation, loose_mask);
  return PSampleLoop(AsDenoiserFn(), cond, schedule_, steps, seed, window(),
                     layout_.target_width, clamp);
}

Matrix DiffusionModel::Sample(const Matrix& raw_observation,
                              std::span<const int> steps, uint64_t seed) const {
  return target_norm_.Invert(SampleNormalized(raw_observation, steps, seed));
}

}  // namespace looseimu
