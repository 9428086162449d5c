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

#ifndef LOOSEIMU_SYNTHDATA_H_
#define LOOSEIMU_SYNTHDATA_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "looseimu/imusim.h"
#include "looseimu/kinematics.h"
#include "looseimu/model.h"

namespace looseimu {

// Maps one window of raw secondary observations [tight | quaternions]
// (N x (9K + 96)) to raw loose sensor features (N x 9K).
using WindowSampler =
    std::function<Matrix(const Matrix& observation, uint64_t seed)>;

// Wraps a trained secondary model. Throws IoError(kIncompatible) when
// the model is not a secondary generator for `sensors` sensors.
WindowSampler SecondarySampler(const DiffusionModel& model,
                               std::span<const int> steps, int sensors);

// Generates a loose track window by window (50% overlap) and stitches the
// windows with a linear crossfade on accelerations and a slerp crossfade
// on orientations. Recordings shorter than a window are padded by
// repeating the last frame.
SensorTrack GenerateLoose(const WindowSampler& sampler, int window_frames,
                          const SensorTrack& tight, const PoseSequence& pose,
                          uint64_t seed);
SensorTrack GenerateLoose(const DiffusionModel& secondary,
                          const SensorTrack& tight, const PoseSequence& pose,
                          std::span<const int> steps, uint64_t seed);

struct BlendSpec {
  enum class Source { kFixed, kUniformPerWindow, kUniformPerSequence };
  Source source = Source::kUniformPerWindow;
  double alpha = 0.5;  // used by kFixed
  uint64_t seed = 0;
  int window_frames = 60;

  void Validate() const;
};

struct BlendResult {
  SensorTrack track;
  // One alpha per block of window_frames frames (the last may be short).
  std::vector<double> alphas;
};

// acc = alpha * c_s + (1 - alpha) * c_l; orientation = slerp(c_l, c_s,
// alpha).
BlendResult Blend(const SensorTrack& simulated, const SensorTrack& generated,
                  const BlendSpec& spec);

// Number of windows WindowDataset cuts from `frames` frames.
int CountWindows(int frames, int window, int stride);

struct CorpusSpec {
  std::vector<PoseSequence> motions;
  std::vector<SensorPlacement> placements;
  std::vector<GarmentProxy> garments;
  SimulationOptions simulation;
  // When set, each recording also gets a generated and a blended track.
  const WindowSampler* secondary = nullptr;
  int secondary_window = 60;
  std::optional<BlendSpec> blend;
  int window = 60;
  int stride = 10;
  uint64_t seed = 0;
  std::string config_hash;
};

struct CorpusEntry {
  std::string dir;  // relative to the corpus root
  int motion = 0;
  int garment_index = 0;
  GarmentProxy garment;
  int frames = 0;
  int windows = 0;
  std::vector<std::string> provenance;
  std::string digest;
};

struct CorpusManifest {
  int schema_version = 1;
  int window = 60;
  int stride = 10;
  int total_windows = 0;
  std::string config_hash;
  uint64_t seed = 0;
  std::vector<CorpusEntry> entries;

  nlohmann::json ToJson() const;
  static CorpusManifest FromJson(const nlohmann::json& j);
};

// One container per (motion, garment) under out_dir, plus
// out_dir/corpus.json.
CorpusManifest BuildCorpus(const CorpusSpec& spec,
                           const std::filesystem::path& out_dir);
CorpusManifest LoadCorpusManifest(const std::filesystem::path& out_dir);

}  // namespace looseimu

#endif  // LOOSEIMU_SYNTHDATA_H_
