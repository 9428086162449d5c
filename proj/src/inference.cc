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

#include "looseimu/inference.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "looseimu/errors.h"

namespace looseimu {

uint64_t StreamFrameSeed(uint64_t seed, int64_t frame) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(frame),
                    static_cast<uint32_t>(static_cast<uint64_t>(frame) >> 32)};
  std::mt19937_64 rng(seq);
  return rng();
}

uint64_t SamplerSeed(const StreamOptions& options, int64_t frame) {
  return options.frame_invariant_noise ? StreamFrameSeed(options.seed, 0)
                                       : StreamFrameSeed(options.seed, frame);
}

StreamState::StreamState(const DiffusionModel& model, StreamOptions options)
    : model_(model), options_(std::move(options)) {
  if (options_.steps.empty()) options_.steps = StridedSteps(model_.schedule().T(), 5);
  if (!(options_.history_blend >= 0.0 && options_.history_blend <= 1.0)) {
    throw ConfigError("history blend must lie in [0, 1]");
  }
}

RowVector StreamState::Step(const Eigen::Ref<const RowVector>& observation) {
  const auto started = std::chrono::steady_clock::now();
  const FeatureLayout& layout = model_.layout();
  if (observation.size() != layout.observation_width) {
    throw ConfigError("stream frame has " + std::to_string(observation.size()) +
                      " values, model expects " +
                      std::to_string(layout.observation_width));
  }
  const int n = model_.window();
  observations_.push_back(observation);
  if (static_cast<int>(observations_.size()) > n) observations_.pop_front();
  const int m = static_cast<int>(observations_.size());

  Matrix window(n, layout.observation_width);
  for (int r = 0; r < n; ++r) {
    const int src = std::max(0, r - (n - m));
    window.row(r) = observations_[src];
  }

  // Row r of the window holds committed history when available; padded
  // warm-up rows are pinned to the first committed prediction.
  clamped_rows_.clear();
  std::vector<const RowVector*> pinned(n, nullptr);
  if (options_.clamp_history && !history_.empty()) {
    const int h = static_cast<int>(history_.size());
    for (int r = 0; r < n - 1; ++r) {
      const int hist_index = r - (n - 1 - h);
      if (hist_index >= 0) {
        pinned[r] = &history_[hist_index];
      } else if (first_prediction_) {
        pinned[r] = &*first_prediction_;
      }
      if (pinned[r]) clamped_rows_.push_back(r);
    }
  }

  SamplerClamp clamp;
  const double blend = options_.history_blend;
  const NoiseSchedule& schedule = model_.schedule();
  clamp.on_estimate = [&](int, Matrix& x0) {
    for (int r : clamped_rows_) {
      if (blend == 1.0) {
        x0.row(r) = *pinned[r];
      } else {
        x0.row(r) = blend * *pinned[r] + (1.0 - blend) * x0.row(r);
      }
    }
  };
  clamp.on_latent = [&](int t_next, Matrix& z, std::mt19937_64& rng) {
    if (blend != 1.0) return;
    std::normal_distribution<double> normal(0.0, 1.0);
    const double a = schedule.sqrt_alpha(t_next);
    const double b = schedule.sqrt_one_minus_alpha(t_next);
    for (int r : clamped_rows_) {
      for (Eigen::Index c = 0; c < z.cols(); ++c)
        z(r, c) = a * (*pinned[r])(c) + b * normal(rng);
    }
  };
  const bool use_clamp = !clamped_rows_.empty();
  last_window_ = model_.SampleNormalized(
      window, options_.steps, SamplerSeed(options_, frame_),
      use_clamp ? &clamp : nullptr);

  RowVector committed = last_window_.row(n - 1);
  if (!first_prediction_) first_prediction_ = committed;
  history_.push_back(committed);
  if (static_cast<int>(history_.size()) > n - 1) history_.pop_front();
  ++frame_;
  const RowVector out = model_.target_norm().Invert(Matrix(committed)).row(0);
  latencies_ms_.push_back(std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - started)
                              .count());
  return out;
}

Matrix StreamWindow(const Matrix& observation, int frame, int window) {
  if (frame < 0 || frame >= observation.rows()) {
    throw ShapeError("stream frame out of range");
  }
  Matrix out(window, observation.cols());
  for (int r = 0; r < window; ++r) {
    out.row(r) = observation.row(std::max(0, frame - (window - 1) + r));
  }
  return out;
}

Matrix PredictStreaming(const DiffusionModel& model, const Matrix& observation,
                        const StreamOptions& options) {
  StreamState state(model, options);
  Matrix out(observation.rows(), model.layout().target_width);
  for (Eigen::Index f = 0; f < observation.rows(); ++f)
    out.row(f) = state.Step(observation.row(f));
  return out;
}

Matrix PredictChunked(const DiffusionModel& model, const Matrix& observation,
                      std::span<const int> steps, uint64_t seed) {
  const int n = model.window();
  const Eigen::Index frames = observation.rows();
  Matrix out(frames, model.layout().target_width);
  for (Eigen::Index start = 0; start < frames; start += n) {
    Matrix window(n, observation.cols());
    for (int r = 0; r < n; ++r)
      window.row(r) = observation.row(std::min<Eigen::Index>(frames - 1, start + r));
    const Matrix pred = model.Sample(window, steps, StreamFrameSeed(seed, start));
    const Eigen::Index take = std::min<Eigen::Index>(n, frames - start);
    out.middleRows(start, take) = pred.topRows(take);
  }
  return out;
}

LatencyProfile SummarizeLatency(std::vector<double> samples) {
  LatencyProfile p;
  p.count = static_cast<int>(samples.size());
  if (samples.empty()) return p;
  std::sort(samples.begin(), samples.end());
  auto quantile = [&](double q) {
    const double pos = q * (samples.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(samples.size() - 1, lo + 1);
    return samples[lo] + (pos - lo) * (samples[hi] - samples[lo]);
  };
  p.p50_ms = quantile(0.50);
  p.p95_ms = quantile(0.95);
  p.max_ms = samples.back();
  double sum = 0.0;
  for (double s : samples) sum += s;
  p.mean_ms = sum / samples.size();
  return p;
}

LatencyProfile ProfileLatency(const DiffusionModel& model, const Matrix& clip,
                              const StreamOptions& options) {
  StreamState state(model, options);
  for (Eigen::Index f = 0; f < clip.rows(); ++f) state.Step(clip.row(f));
  return SummarizeLatency(state.latencies_ms());
}

PoseSequence DecodePoseSequence(const FeatureLayout& layout,
                                const Matrix& target, double fps) {
  if (layout.pose.width == 0) throw ConfigError("layout carries no pose channels");
  if (target.cols() != layout.target_width) {
    throw ShapeError("target width does not match the layout");
  }
  PoseSequence pose(static_cast<int>(target.rows()), fps);
  for (int f = 0; f < pose.frames(); ++f) {
    const RowVector row = target.row(f).segment(layout.pose.begin, layout.pose.width);
    const auto local = DecodePoseFrame(row, layout.joints);
    for (int j = 0; j < kJointCount; ++j) pose.rotation(f, j) = local[j];
    pose.root_translation(f) = Vec3::Zero();
  }
  return pose;
}

}  // namespace looseimu
