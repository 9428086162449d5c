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

#include "looseimu/features.h"

#include <algorithm>
#include <cmath>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

void AppendRange(std::vector<int>& cols, int begin, int width) {
  for (int c = begin; c < begin + width; ++c) cols.push_back(c);
}

bool Contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

std::string ToString(BodySet b) {
  return b == BodySet::kUpper ? "upper" : "whole";
}

std::string ToString(ModelKind k) {
  switch (k) {
    case ModelKind::kSecondary: return "secondary";
    case ModelKind::kConditional: return "unaware";
    case ModelKind::kGarmentAware: return "aware";
    case ModelKind::kUnconditional: return "unconditional";
    case ModelKind::kPoseOnly: return "pose-only";
  }
  return "unaware";
}

BodySet BodySetFromString(const std::string& s) {
  if (s == "upper") return BodySet::kUpper;
  if (s == "whole") return BodySet::kWhole;
  throw ConfigError("unknown body set: " + s);
}

ModelKind ModelKindFromString(const std::string& s) {
  for (ModelKind k : {ModelKind::kSecondary, ModelKind::kConditional,
                      ModelKind::kGarmentAware, ModelKind::kUnconditional,
                      ModelKind::kPoseOnly}) {
    if (ToString(k) == s) return k;
  }
  throw ConfigError("unknown model kind: " + s);
}

std::vector<int> ExtremityJoints(BodySet body) {
  if (body == BodySet::kUpper) {
    return {kLeftShoulder, kRightShoulder, kLeftElbow,
            kRightElbow,   kLeftWrist,     kRightWrist};
  }
  return {kLeftKnee,      kRightKnee,     kLeftAnkle,  kRightAnkle,
          kLeftFoot,      kRightFoot,     kLeftShoulder, kRightShoulder,
          kLeftElbow,     kRightElbow,    kLeftWrist,  kRightWrist,
          kLeftHand,      kRightHand};
}

std::vector<int> EvaluationJoints(BodySet body) {
  std::vector<int> joints;
  if (body == BodySet::kWhole) {
    for (int j = 0; j < kJointCount; ++j) joints.push_back(j);
    return joints;
  }
  for (int j : Skeleton::Smpl().UpperBodyJoints()) {
    if (j != kPelvis && j != kLeftWrist && j != kRightWrist) joints.push_back(j);
  }
  return joints;
}

FeatureLayout FeatureLayout::Make(ModelKind kind, BodySet body) {
  FeatureLayout l;
  l.kind = kind;
  l.body = body;
  if (body == BodySet::kUpper) {
    l.joints = Skeleton::Smpl().UpperBodyJoints();
    l.sensors = UpperSensorSet();
  } else {
    for (int j = 0; j < kJointCount; ++j) l.joints.push_back(j);
    l.sensors = SixSensorSet();
  }
  const int nj = static_cast<int>(l.joints.size());
  const int ns = static_cast<int>(l.sensors.size());
  const int sensor_w = ns * kSensorChannels;

  const bool has_pose = kind != ModelKind::kSecondary;
  const bool has_loose =
      kind == ModelKind::kSecondary || kind == ModelKind::kUnconditional;
  const bool has_tight = kind == ModelKind::kConditional ||
                         kind == ModelKind::kGarmentAware ||
                         kind == ModelKind::kUnconditional;
  const bool has_pos = has_pose;
  int col = 0;
  l.pose = {col, has_pose ? nj * kSixD : 0};
  col = l.pose.end();
  l.loose = {col, has_loose ? sensor_w : 0};
  col = l.loose.end();
  l.tight = {col, has_tight ? sensor_w : 0};
  col = l.tight.end();
  l.positions = {col, has_pos ? nj * 3 : 0};
  l.target_width = l.positions.end();

  switch (kind) {
    case ModelKind::kSecondary:
      l.observation_width = sensor_w + kJointCount * 4;
      l.condition_width = l.observation_width;
      l.parts = {sensor_w, sensor_w, kJointCount * 4, 0};
      break;
    case ModelKind::kConditional:
      l.observation_width = sensor_w;
      l.condition_width = sensor_w;
      l.parts = {l.pose.width, l.tight.width, l.positions.width,
                 l.condition_width};
      break;
    case ModelKind::kGarmentAware:
      l.observation_width = sensor_w + kGarmentChannels;
      l.condition_width = l.observation_width;
      l.parts = {l.pose.width, l.tight.width, l.positions.width,
                 l.condition_width};
      break;
    case ModelKind::kUnconditional:
      l.observation_width = sensor_w;
      l.condition_width = 2 * sensor_w;  // [x_masked | mask]
      l.parts = {l.pose.width, l.loose.width,
                 l.tight.width + l.positions.width, l.condition_width};
      break;
    case ModelKind::kPoseOnly:
      l.observation_width = sensor_w;
      l.condition_width = sensor_w;
      l.parts = {l.pose.width, l.positions.width, l.condition_width, 0};
      break;
  }

  if (has_pose) {
    AppendRange(l.root_rotation_cols, l.pose.begin, kSixD);
    AppendRange(l.joint_rotation_cols, l.pose.begin + kSixD,
                l.pose.width - kSixD);
    const std::vector<int> ext = ExtremityJoints(body);
    for (int slot = 0; slot < nj; ++slot) {
      auto& dst = Contains(ext, l.joints[slot]) ? l.extremity_position_cols
                                                : l.other_position_cols;
      AppendRange(dst, l.positions.begin + slot * 3, 3);
    }
  }
  AppendRange(l.tight_cols, l.tight.begin, l.tight.width);
  AppendRange(l.loose_cols, l.loose.begin, l.loose.width);
  if (has_loose) {
    AppendRange(l.root_sensor_loose_cols,
                l.loose.begin + l.RootSensorIndex() * kSensorChannels,
                kSensorChannels);
  }
  return l;
}

int FeatureLayout::JointSlot(int smpl_joint) const {
  for (size_t i = 0; i < joints.size(); ++i)
    if (joints[i] == smpl_joint) return static_cast<int>(i);
  return -1;
}

int FeatureLayout::RootSensorIndex() const {
  for (size_t i = 0; i < sensors.size(); ++i)
    if (sensors[i].attach_joint == kPelvis) return static_cast<int>(i);
  return 0;
}

Matrix PoseFeatures(const PoseSequence& pose, const std::vector<int>& joints) {
  Matrix m(pose.frames(), static_cast<Eigen::Index>(joints.size()) * kSixD);
  for (int f = 0; f < pose.frames(); ++f) {
    for (size_t s = 0; s < joints.size(); ++s) {
      const auto six = pose.rotation(f, joints[s]).six_d();
      for (int k = 0; k < kSixD; ++k) m(f, s * kSixD + k) = six[k];
    }
  }
  return m;
}

Matrix PositionFeatures(const GlobalSequence& global,
                        const std::vector<int>& joints) {
  Matrix m(global.frames, static_cast<Eigen::Index>(joints.size()) * 3);
  for (int f = 0; f < global.frames; ++f) {
    const Vec3& root = global.position[f * kJointCount + kRootJoint];
    for (size_t s = 0; s < joints.size(); ++s) {
      const Vec3 p = global.position[f * kJointCount + joints[s]] - root;
      m.block<1, 3>(f, s * 3) = p.transpose();
    }
  }
  return m;
}

Matrix SensorFeatures(const SensorTrack& track) {
  Matrix m(track.frames(), track.sensors() * kSensorChannels);
  for (int f = 0; f < track.frames(); ++f) {
    for (int s = 0; s < track.sensors(); ++s) {
      const auto six = track.ori(f, s).six_d();
      for (int k = 0; k < kSixD; ++k) m(f, s * kSensorChannels + k) = six[k];
      m.block<1, 3>(f, s * kSensorChannels + kSixD) =
          track.acc(f, s).transpose();
    }
  }
  return m;
}

Matrix QuaternionFeatures(const PoseSequence& pose) {
  Matrix m(pose.frames(), kJointCount * 4);
  for (int f = 0; f < pose.frames(); ++f) {
    for (int j = 0; j < kJointCount; ++j) {
      Eigen::Quaterniond q = pose.rotation(f, j).quat();
      if (q.w() < 0.0) q.coeffs() = -q.coeffs();
      m(f, j * 4 + 0) = q.w();
      m(f, j * 4 + 1) = q.x();
      m(f, j * 4 + 2) = q.y();
      m(f, j * 4 + 3) = q.z();
    }
  }
  return m;
}

Matrix GarmentFeatures(const GarmentProxy& proxy, int frames) {
  Matrix m(frames, kGarmentChannels);
  m.col(0).setConstant(proxy.gamma);
  m.col(1).setConstant(proxy.height_cm);
  m.col(2).setConstant(proxy.bmi);
  return m;
}

SensorTrack SensorTrackFromFeatures(const Matrix& features,
                                    const std::vector<std::string>& ids,
                                    double fps, Tightness tag) {
  const int ns = static_cast<int>(ids.size());
  if (features.cols() != ns * kSensorChannels) {
    throw ShapeError("sensor features width does not match sensor count");
  }
  SensorTrack track(static_cast<int>(features.rows()), ids, fps, tag);
  for (int f = 0; f < track.frames(); ++f) {
    for (int s = 0; s < ns; ++s) {
      const double* p = features.row(f).data() + s * kSensorChannels;
      track.ori(f, s) = Rotation::FromSixD({p, kSixD});
      track.acc(f, s) = Vec3(p[6], p[7], p[8]);
    }
  }
  return track;
}

std::vector<Rotation> DecodePoseFrame(const Eigen::Ref<const RowVector>& pose,
                                      const std::vector<int>& joints) {
  if (pose.size() != static_cast<Eigen::Index>(joints.size()) * kSixD) {
    throw ShapeError("pose channels do not match joint set");
  }
  std::vector<Rotation> local(kJointCount);
  for (size_t s = 0; s < joints.size(); ++s) {
    std::array<double, kSixD> six;
    for (int k = 0; k < kSixD; ++k) six[k] = pose[s * kSixD + k];
    try {
      local[joints[s]] = Rotation::FromSixD(six);
    } catch (const ValidationError&) {
      local[joints[s]] = Rotation::Identity();
    }
  }
  return local;
}

RecordingFeatures BuildFeatures(const FeatureLayout& layout,
                                const PoseSequence& pose,
                                const SensorTrack& tight,
                                const SensorTrack& loose,
                                const GarmentProxy& garment) {
  tight.CheckSameShape(loose);
  if (tight.frames() != pose.frames()) {
    throw ShapeError("pose and sensor tracks differ in frame count");
  }
  if (tight.sensors() != static_cast<int>(layout.sensors.size())) {
    throw ShapeError("sensor track does not match the layout's sensor set");
  }
  const int frames = pose.frames();
  RecordingFeatures out;
  out.target = Matrix::Zero(frames, layout.target_width);
  const Matrix loose_f = SensorFeatures(loose);
  const Matrix tight_f = SensorFeatures(tight);
  if (layout.pose.width > 0) {
    out.target.middleCols(layout.pose.begin, layout.pose.width) =
        PoseFeatures(pose, layout.joints);
    const GlobalSequence global =
        ForwardKinematicsSequence(Skeleton::Smpl(), pose);
    out.target.middleCols(layout.positions.begin, layout.positions.width) =
        PositionFeatures(global, layout.joints);
  }
  if (layout.loose.width > 0)
    out.target.middleCols(layout.loose.begin, layout.loose.width) = loose_f;
  if (layout.tight.width > 0)
    out.target.middleCols(layout.tight.begin, layout.tight.width) = tight_f;

  out.observation.resize(frames, layout.observation_width);
  if (layout.kind == ModelKind::kSecondary) {
    out.observation.leftCols(tight_f.cols()) = tight_f;
    out.observation.rightCols(kJointCount * 4) = QuaternionFeatures(pose);
  } else {
    out.observation.leftCols(loose_f.cols()) = loose_f;
    if (layout.kind == ModelKind::kGarmentAware) {
      out.observation.rightCols(kGarmentChannels) =
          GarmentFeatures(garment, frames);
    }
  }
  return out;
}

Normalizer Normalizer::Identity(int width) {
  Normalizer n;
  n.mean = RowVector::Zero(width);
  n.std = RowVector::Ones(width);
  return n;
}

Normalizer Normalizer::Fit(const std::vector<const Matrix*>& data,
                           double std_floor) {
  if (data.empty()) throw ValidationError("cannot fit normalizer on no data");
  const Eigen::Index width = data.front()->cols();
  RowVector sum = RowVector::Zero(width);
  RowVector sq = RowVector::Zero(width);
  double count = 0.0;
  for (const Matrix* m : data) {
    if (m->cols() != width) throw ShapeError("normalizer inputs differ in width");
    sum += m->colwise().sum();
    sq += m->array().square().colwise().sum().matrix();
    count += static_cast<double>(m->rows());
  }
  if (count == 0.0) return Identity(static_cast<int>(width));
  Normalizer n;
  n.mean = sum / count;
  n.std.resize(width);
  for (Eigen::Index c = 0; c < width; ++c) {
    const double var = std::max(0.0, sq[c] / count - n.mean[c] * n.mean[c]);
    n.std[c] = std::max(std::sqrt(var), std_floor);
  }
  return n;
}

Matrix Normalizer::Apply(const Matrix& raw) const {
  if (raw.cols() != mean.size()) throw ShapeError("normalizer width mismatch");
  Matrix out = raw.rowwise() - mean;
  return out.array().rowwise() / std.array();
}

Matrix Normalizer::Invert(const Matrix& normalized) const {
  if (normalized.cols() != mean.size())
    throw ShapeError("normalizer width mismatch");
  Matrix out = normalized.array().rowwise() * std.array();
  return out.rowwise() + mean;
}

}  // namespace looseimu
