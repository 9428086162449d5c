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

#include "closed_loop.h"

#include <cmath>
#include <iostream>

#include "looseimu/imusim.h"
#include "looseimu/motion_gen.h"

namespace looseimu::testing {
namespace {

Split MakeSplit(const ClosedLoopOptions& o, const FeatureLayout& layout,
                double minutes, uint64_t seed) {
  Split split;
  const int clip_frames = static_cast<int>(std::lround(o.clip_minutes * 60 * 30));
  int remaining = static_cast<int>(std::lround(minutes * 60 * 30));
  GarmentProxy garment;
  garment.gamma = o.gamma;
  for (uint64_t clip = 0; remaining > 0; ++clip) {
    const int frames = std::min(clip_frames, remaining);
    remaining -= frames;
    PoseSequence pose = GenerateMotion(frames, seed * 1000 + clip).pose;
    const SensorTrack tight = SimulateTight(pose, layout.sensors);
    const SensorTrack loose =
        SimulateLoose(pose, layout.sensors, garment, seed * 7919 + clip).track;
    split.features.push_back(BuildFeatures(layout, pose, tight, loose, garment));
    split.poses.push_back(std::move(pose));
  }
  return split;
}

}  // namespace

ClosedLoopData BuildClosedLoopData(const ClosedLoopOptions& o) {
  ClosedLoopData data;
  data.layout = FeatureLayout::Make(ModelKind::kConditional, BodySet::kWhole);
  data.train = MakeSplit(o, data.layout, o.train_minutes, o.seed);
  data.test = MakeSplit(o, data.layout, o.test_minutes, o.seed + 1);
  return data;
}

TrainedModel TrainClosedLoopModel(const ClosedLoopData& data,
                                  const ClosedLoopOptions& o) {
  WindowDataset dataset(o.window, o.stride);
  for (const auto& f : data.train.features) dataset.Add(f);
  DiffusionModel model(data.layout,
                       DenoiserConfigFor(data.layout, Profile::kTiny, o.window),
                       NoiseSchedule::Make(1000, ScheduleKind::kCosine),
                       dataset.FitTargetNormalizer(),
                       dataset.FitObservationNormalizer(), o.seed);
  TrainConfig config;
  config.steps = o.steps;
  config.batch = o.batch;
  config.optimizer.learning_rate = o.learning_rate;
  config.sensor_dropout = o.sensor_dropout;
  config.time_budget_seconds = o.time_budget_seconds;
  config.seed = o.seed;
  config.log_every = 200;
  TrainResult result = Train(model, dataset, config, nullptr,
                             [&](const LossRecord& r) {
                               if (o.verbose) {
                                 std::cerr << "step " << r.step << " loss "
                                           << r.total << "\n";
                               }
                             });
  return {std::move(model), std::move(result)};
}

std::vector<PoseSequence> PredictTestPoses(const DiffusionModel& model,
                                           const ClosedLoopData& data,
                                           const StreamOptions& stream,
                                           bool streaming, int dropped_sensors,
                                           uint64_t dropout_seed) {
  std::vector<PoseSequence> out;
  const int sensors = static_cast<int>(data.layout.sensors.size());
  for (size_t i = 0; i < data.test.features.size(); ++i) {
    Matrix obs = data.test.features[i].observation;
    if (dropped_sensors > 0) {
      obs = ApplySensorDropout(obs, sensors, dropped_sensors, DropoutPolicy::kZero,
                               dropout_seed + i)
                .observation;
    }
    const Matrix pred =
        streaming ? PredictStreaming(model, obs, stream)
                  : PredictChunked(model, obs, stream.steps, stream.seed + i);
    out.push_back(DecodePoseSequence(data.layout, pred, data.test.poses[i].fps()));
  }
  return out;
}

EvalReport EvaluateTest(const ClosedLoopData& data,
                        const std::vector<PoseSequence>& predictions) {
  std::vector<EvalReport> reports;
  for (size_t i = 0; i < predictions.size(); ++i)
    reports.push_back(Evaluate(predictions[i], data.test.poses[i], BodySet::kWhole));
  return AverageReports(reports);
}

}  // namespace looseimu::testing
