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

#ifndef LOOSEIMU_METRICS_H_
#define LOOSEIMU_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "looseimu/features.h"
#include "looseimu/kinematics.h"
#include "looseimu/tensor.h"

namespace looseimu {

// Mean over frames of the per-frame joint average; std across those
// per-frame values.
struct MetricStat {
  double mean = 0.0;
  double std = 0.0;
};

enum class RotationFrame { kGlobal, kLocal };

// Degrees. Global joint rotations by default.
MetricStat Mpjre(const PoseSequence& pred, const PoseSequence& gt,
                 const std::vector<int>& joints,
                 RotationFrame frame = RotationFrame::kGlobal);
MetricStat Mpjre(const GlobalSequence& pred, const GlobalSequence& gt,
                 const std::vector<int>& joints);

// Centimeters, after translating both skeletons so the roots coincide.
MetricStat Mpjpe(const GlobalSequence& pred, const GlobalSequence& gt,
                 const std::vector<int>& joints);

// cm/s on root-aligned positions. Needs >= 2 frames.
double Mpjve(const GlobalSequence& pred, const GlobalSequence& gt,
             const std::vector<int>& joints, double fps);

// frames x 3J positions of `joints`, optionally minus the root position.
Matrix JointPositions(const GlobalSequence& global,
                      const std::vector<int>& joints, bool root_relative);

// Mean norm of the third difference times fps^3, in 10^2 m/s^3.
// `positions` is frames x 3J. Needs >= 4 frames.
double Jitter(const Matrix& positions, double fps);
double Jitter(const GlobalSequence& global, const std::vector<int>& joints,
              double fps, bool root_relative = true);

enum class DropoutPolicy { kZero, kFreeze };
std::string ToString(DropoutPolicy p);
DropoutPolicy DropoutPolicyFromString(const std::string& s);

struct DropoutResult {
  Matrix observation;
  std::vector<int> dropped;  // sensor indices, ascending
};

// Zeroes (or freezes at their first-frame value) the 9 channels of k
// sensors picked by a seeded shuffle. Channels past 9 * sensors (garment
// triple) are untouched. Throws ValidationError if k is out of range.
DropoutResult ApplySensorDropout(const Matrix& observation, int sensors, int k,
                                 DropoutPolicy policy, uint64_t seed);

struct JointError {
  std::string joint;
  double rotation_deg = 0.0;
  double position_cm = 0.0;
};

struct EvalReport {
  MetricStat mpjre_deg;
  MetricStat mpjpe_cm;
  double mpjve_cm_s = 0.0;
  double jitter = 0.0;     // 10^2 m/s^3
  double gt_jitter = 0.0;  // 10^2 m/s^3
  double root_angle_error_deg = 0.0;
  std::vector<JointError> per_joint;
  // Protocol metadata.
  std::string joint_set;
  std::string rotation_frame = "global";
  std::string alignment = "root_translation";
  int dropped_sensors = 0;
  std::string dropout_policy = "zero";
  int frames = 0;
  double fps = 30.0;

  nlohmann::json ToJson() const;
  // "metric,value" rows followed by per-joint rows.
  std::string ToCsv() const;
};

EvalReport Evaluate(const PoseSequence& pred, const PoseSequence& gt,
                    BodySet body, RotationFrame frame = RotationFrame::kGlobal);

// Frame-weighted average of per-recording reports. Protocol fields come
// from the first report; an empty list gives an empty report.
EvalReport AverageReports(const std::vector<EvalReport>& reports);

// Per-joint chordal mean (6D average, then Gram-Schmidt) of the local
// rotations over all frames of all sequences.
std::vector<Rotation> MeanLocalPose(const std::vector<const PoseSequence*>& data);
PoseSequence ConstantPose(const std::vector<Rotation>& local, int frames,
                          double fps);

}  // namespace looseimu

#endif  // LOOSEIMU_METRICS_H_
