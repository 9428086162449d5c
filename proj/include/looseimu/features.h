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

#ifndef LOOSEIMU_FEATURES_H_
#define LOOSEIMU_FEATURES_H_

#include <array>
#include <string>
#include <vector>

#include "looseimu/imusim.h"
#include "looseimu/kinematics.h"
#include "looseimu/tensor.h"

namespace looseimu {

// Values per sensor in network-facing channels: 6D orientation then
// acceleration.
inline constexpr int kSensorChannels = 9;
inline constexpr int kSixD = 6;
inline constexpr int kGarmentChannels = 3;

enum class BodySet { kUpper, kWhole };
enum class ModelKind {
  kSecondary,      // loose IMU from tight IMU + pose quaternions
  kConditional,    // pose from loose IMU
  kGarmentAware,   // pose from loose IMU + (gamma, height, bmi)
  kUnconditional,  // inpainting over [pose | loose | tight | positions]
  kPoseOnly,       // ablation: pose + positions, no tight IMU
};

std::string ToString(BodySet b);
std::string ToString(ModelKind k);
BodySet BodySetFromString(const std::string& s);
ModelKind ModelKindFromString(const std::string& s);

struct ColumnRange {
  int begin = 0;
  int width = 0;
  int end() const { return begin + width; }
};

// Channel bookkeeping for one model family. Target columns are laid out
// [pose | loose | tight | positions] with absent blocks of width 0.
struct FeatureLayout {
  ModelKind kind = ModelKind::kConditional;
  BodySet body = BodySet::kWhole;
  std::vector<int> joints;  // SMPL indices, parents precede children
  std::vector<SensorPlacement> sensors;
  ColumnRange pose;
  ColumnRange loose;
  ColumnRange tight;
  ColumnRange positions;
  int target_width = 0;
  int condition_width = 0;
  // Raw observed channels (loose IMU, plus garment triple if aware).
  int observation_width = 0;
  std::array<int, 4> parts = {0, 0, 0, 0};

  // Column groups used by the loss terms.
  std::vector<int> root_rotation_cols;
  std::vector<int> joint_rotation_cols;
  std::vector<int> extremity_position_cols;
  std::vector<int> other_position_cols;
  std::vector<int> tight_cols;
  std::vector<int> loose_cols;
  // Loose channels of the root (pelvis/waist) sensor.
  std::vector<int> root_sensor_loose_cols;

  static FeatureLayout Make(ModelKind kind, BodySet body);
  int JointSlot(int smpl_joint) const;  // -1 if absent
  int RootSensorIndex() const;
};

// Joints whose positions carry the extremity weight: arms for the upper
// body, arms and legs for the whole body.
std::vector<int> ExtremityJoints(BodySet body);
// Joints averaged by rotation/position metrics.
std::vector<int> EvaluationJoints(BodySet body);

// frames x (J * 6), local rotations of `joints`.
Matrix PoseFeatures(const PoseSequence& pose, const std::vector<int>& joints);
// frames x (J * 3), global positions minus the root position.
Matrix PositionFeatures(const GlobalSequence& global,
                        const std::vector<int>& joints);
// frames x (K * 9).
Matrix SensorFeatures(const SensorTrack& track);
// frames x 96, quaternions with w >= 0.
Matrix QuaternionFeatures(const PoseSequence& pose);
Matrix GarmentFeatures(const GarmentProxy& proxy, int frames);

SensorTrack SensorTrackFromFeatures(const Matrix& features,
                                    const std::vector<std::string>& ids,
                                    double fps, Tightness tag);
// Local rotations of the joints in `joints` decoded from one frame's 6D
// channels; joints outside the set stay identity.
std::vector<Rotation> DecodePoseFrame(const Eigen::Ref<const RowVector>& pose,
                                      const std::vector<int>& joints);

// All aligned channels of one simulated recording.
struct RecordingFeatures {
  Matrix target;       // frames x target_width
  Matrix observation;  // frames x observation_width (raw loose [+ garment])
};

// Builds target/observation for `layout`. For the secondary kind the
// observation is [tight | quaternions] and the target is the loose track.
RecordingFeatures BuildFeatures(const FeatureLayout& layout,
                                const PoseSequence& pose,
                                const SensorTrack& tight,
                                const SensorTrack& loose,
                                const GarmentProxy& garment);

// Per-channel affine normalization with a standard-deviation floor.
struct Normalizer {
  RowVector mean;
  RowVector std;

  static Normalizer Identity(int width);
  static Normalizer Fit(const std::vector<const Matrix*>& data,
                        double std_floor = 0.05);
  Matrix Apply(const Matrix& raw) const;
  Matrix Invert(const Matrix& normalized) const;
  int width() const { return static_cast<int>(mean.size()); }
};

}  // namespace looseimu

#endif  // LOOSEIMU_FEATURES_H_
