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

#ifndef LOOSEIMU_TRAINER_H_
#define LOOSEIMU_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "looseimu/features.h"
#include "looseimu/losses.h"
#include "looseimu/model.h"

namespace looseimu {

// Raw, aligned recordings cut into fixed-length windows on demand.
class WindowDataset {
 public:
  WindowDataset(int window_frames, int stride);

  // Recordings shorter than one window contribute no windows.
  void Add(RecordingFeatures recording);

  int window_frames() const { return window_; }
  size_t size() const { return index_.size(); }
  size_t recordings() const { return recordings_.size(); }
  const RecordingFeatures& recording(size_t i) const { return recordings_[i]; }
  // (recording, first frame) of window i.
  std::pair<size_t, int> window(size_t i) const { return index_[i]; }

  // Stacks the selected windows: (B*N) x width.
  void Gather(std::span<const size_t> windows, Matrix* target,
              Matrix* observation) const;

  Normalizer FitTargetNormalizer() const;
  Normalizer FitObservationNormalizer() const;

 private:
  int window_;
  int stride_;
  std::vector<RecordingFeatures> recordings_;
  std::vector<std::pair<size_t, int>> index_;
};

struct OptimizerConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double grad_clip = 1.0;  // global L2 norm; <= 0 disables
};

struct TrainConfig {
  int steps = 1000;
  int batch = 64;
  OptimizerConfig optimizer;
  LossWeights weights;
  AblationWeights ablation;
  double consistency_scale = kConsistencyNoiseScale;
  // Probability, per window and sensor, of zero-filling the sensor's raw
  // observation channels.
  double sensor_dropout = 0.0;
  uint64_t seed = 0;
  int log_every = 50;
  // Stop early once this many seconds have elapsed; <= 0 disables.
  double time_budget_seconds = 0.0;
  // Where the offending batch is written if the loss turns non-finite.
  std::filesystem::path divergence_dump;
};

struct AdamState {
  int64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;
};

struct LossRecord {
  int64_t step = 0;
  double total = 0.0;
  std::vector<LossTerm> terms;
};

struct TrainResult {
  std::vector<LossRecord> curve;
  AdamState optimizer;
  double seconds = 0.0;
};

// One optimizer step worth of loss + gradients on a stacked batch.
struct BatchLoss {
  LossBreakdown loss;
  Gradients grads;
};

// Evaluates the variant's loss on one batch and back-propagates it.
// `t` holds one diffusion step per window.
BatchLoss ComputeBatchLoss(const DiffusionModel& model, const Matrix& target_norm,
                           const Matrix& raw_observation, std::span<const int> t,
                           const Matrix& noise, const TrainConfig& config,
                           std::mt19937_64& rng);

void AdamUpdate(std::vector<Parameter>& params, const Gradients& grads,
                const OptimizerConfig& config, AdamState& state);

// DDPM training: uniform t per window, q_sample of the target stack,
// denoise, variant loss, clipped Adam step. Deterministic for a seed.
// Throws TrainingDivergedError on a non-finite loss after dumping the batch.
TrainResult Train(DiffusionModel& model, const WindowDataset& data,
                  const TrainConfig& config, AdamState* resume = nullptr,
                  const std::function<void(const LossRecord&)>& on_log = {});

// step,total,<term>... one row per record. A non-empty `comment` is
// written first as a "# " line.
void WriteLossCurveCsv(const std::vector<LossRecord>& curve,
                       const std::filesystem::path& path,
                       const std::string& comment = "");

}  // namespace looseimu

#endif  // LOOSEIMU_TRAINER_H_
