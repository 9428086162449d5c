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

#ifndef LOOSEIMU_INFERENCE_H_
#define LOOSEIMU_INFERENCE_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "looseimu/model.h"

namespace looseimu {

struct StreamOptions {
  // Sampler steps; empty means StridedSteps(T, 5).
  std::vector<int> steps;
  // Fix the first N-1 window frames to committed predictions while
  // sampling.
  bool clamp_history = true;
  // 1 replaces the clamped estimate rows outright; below 1 mixes them
  // with the network estimate.
  double history_blend = 1.0;
  uint64_t seed = 0;
  // Draw the same sampler noise at every frame instead of a fresh
  // per-frame stream.
  bool frame_invariant_noise = true;
};

// Seed used for the sampler at stream frame `frame` when the noise is
// not frame-invariant.
uint64_t StreamFrameSeed(uint64_t seed, int64_t frame);
uint64_t SamplerSeed(const StreamOptions& options, int64_t frame);

// Sliding-window streaming estimator. One instance per sensor stream;
// calls must be strictly ordered.
class StreamState {
 public:
  StreamState(const DiffusionModel& model, StreamOptions options);

  // Consumes one raw observation frame and returns the committed raw
  // target row for it. Throws ConfigError on a width mismatch.
  RowVector Step(const Eigen::Ref<const RowVector>& observation);

  int64_t frames_seen() const { return frame_; }
  int window() const { return model_.window(); }
  // Normalized committed predictions of the most recent frames, oldest
  // first; never longer than N - 1.
  const std::deque<RowVector>& history() const { return history_; }
  // Normalized x0 window returned by the sampler in the last Step.
  const Matrix& last_window() const { return last_window_; }
  // Rows of last_window() that were clamped.
  const std::vector<int>& last_clamped_rows() const { return clamped_rows_; }
  const std::vector<double>& latencies_ms() const { return latencies_ms_; }
  const StreamOptions& options() const { return options_; }

 private:
  const DiffusionModel& model_;
  StreamOptions options_;
  int64_t frame_ = 0;
  std::deque<RowVector> observations_;
  std::deque<RowVector> history_;
  std::optional<RowVector> first_prediction_;
  Matrix last_window_;
  std::vector<int> clamped_rows_;
  std::vector<double> latencies_ms_;
};

inline RowVector StreamStep(StreamState& state,
                            const Eigen::Ref<const RowVector>& observation) {
  return state.Step(observation);
}

// Runs a whole recording through a fresh StreamState; frames x target.
Matrix PredictStreaming(const DiffusionModel& model, const Matrix& observation,
                        const StreamOptions& options);

// Samples back-to-back windows of N frames (the tail window is padded by
// repeating the last frame) without history clamping; frames x target.
Matrix PredictChunked(const DiffusionModel& model, const Matrix& observation,
                      std::span<const int> steps, uint64_t seed);

// The window the stream would sample at `frame`, left-padded by repeating
// frame 0 during warm-up.
Matrix StreamWindow(const Matrix& observation, int frame, int window);

struct LatencyProfile {
  int count = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
  double max_ms = 0.0;
  double mean_ms = 0.0;
};

LatencyProfile SummarizeLatency(std::vector<double> samples_ms);
// Replays `clip` through a fresh stream and summarizes Step wall time.
LatencyProfile ProfileLatency(const DiffusionModel& model, const Matrix& clip,
                              const StreamOptions& options);

// Decodes the pose channels of predicted target rows into local joint
// rotations (joints outside the layout stay identity) with zero root
// translation.
PoseSequence DecodePoseSequence(const FeatureLayout& layout,
                                const Matrix& target, double fps);

}  // namespace looseimu

#endif  // LOOSEIMU_INFERENCE_H_
