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

#include "looseimu/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

void CheckAligned(int a, int b) {
  if (a != b) {
    throw ShapeError("sequences are misaligned: " + std::to_string(a) + " vs " +
                     std::to_string(b) + " frames");
  }
}

void CheckJoints(const std::vector<int>& joints) {
  if (joints.empty()) throw ValidationError("empty joint set");
  for (int j : joints) {
    if (j < 0 || j >= kJointCount) throw ValidationError("joint index out of range");
  }
}

MetricStat Summarize(const std::vector<double>& per_frame) {
  MetricStat s;
  if (per_frame.empty()) return s;
  s.mean = std::accumulate(per_frame.begin(), per_frame.end(), 0.0) / per_frame.size();
  double var = 0.0;
  for (double v : per_frame) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / per_frame.size());
  return s;
}

Vec3 Aligned(const GlobalSequence& g, int f, int j) {
  return g.position[f * kJointCount + j] - g.position[f * kJointCount + kRootJoint];
}

}  // namespace

MetricStat Mpjre(const GlobalSequence& pred, const GlobalSequence& gt,
                 const std::vector<int>& joints) {
  CheckAligned(pred.frames, gt.frames);
  CheckJoints(joints);
  std::vector<double> per_frame(pred.frames);
  for (int f = 0; f < pred.frames; ++f) {
    double sum = 0.0;
    for (int j : joints) {
      sum += AngularOffsetDeg(pred.rotation[f * kJointCount + j],
                              gt.rotation[f * kJointCount + j]);
    }
    per_frame[f] = sum / joints.size();
  }
  return Summarize(per_frame);
}

MetricStat Mpjre(const PoseSequence& pred, const PoseSequence& gt,
                 const std::vector<int>& joints, RotationFrame frame) {
  CheckAligned(pred.frames(), gt.frames());
  if (frame == RotationFrame::kGlobal) {
    const Skeleton& sk = Skeleton::Smpl();
    return Mpjre(ForwardKinematicsSequence(sk, pred),
                 ForwardKinematicsSequence(sk, gt), joints);
  }
  CheckJoints(joints);
  std::vector<double> per_frame(pred.frames());
  for (int f = 0; f < pred.frames(); ++f) {
    double sum = 0.0;
    for (int j : joints) sum += AngularOffsetDeg(pred.rotation(f, j), gt.rotation(f, j));
    per_frame[f] = sum / joints.size();
  }
  return Summarize(per_frame);
}

MetricStat Mpjpe(const GlobalSequence& pred, const GlobalSequence& gt,
                 const std::vector<int>& joints) {
  CheckAligned(pred.frames, gt.frames);
  CheckJoints(joints);
  std::vector<double> per_frame(pred.frames);
  for (int f = 0; f < pred.frames; ++f) {
    double sum = 0.0;
    for (int j : joints) sum += (Aligned(pred, f, j) - Aligned(gt, f, j)).norm();
    per_frame[f] = 100.0 * sum / joints.size();
  }
  return Summarize(per_frame);
}

double Mpjve(const GlobalSequence& pred, const GlobalSequence& gt,
             const std::vector<int>& joints, double fps) {
  CheckAligned(pred.frames, gt.frames);
  CheckJoints(joints);
  if (pred.frames < 2) throw SequenceLengthError("MPJVE needs >= 2 frames");
  double sum = 0.0;
  for (int f = 1; f < pred.frames; ++f) {
    for (int j : joints) {
      const Vec3 vp = Aligned(pred, f, j) - Aligned(pred, f - 1, j);
      const Vec3 vg = Aligned(gt, f, j) - Aligned(gt, f - 1, j);
      sum += (vp - vg).norm();
    }
  }
  return sum / ((pred.frames - 1.0) * joints.size()) * fps * 100.0;
}

Matrix JointPositions(const GlobalSequence& global,
                      const std::vector<int>& joints, bool root_relative) {
  CheckJoints(joints);
  Matrix out(global.frames, 3 * static_cast<Eigen::Index>(joints.size()));
  for (int f = 0; f < global.frames; ++f) {
    for (size_t i = 0; i < joints.size(); ++i) {
      const Vec3 p = root_relative ? Aligned(global, f, joints[i])
                                   : global.position[f * kJointCount + joints[i]];
      out.block<1, 3>(f, 3 * i) = p.transpose();
    }
  }
  return out;
}

double Jitter(const Matrix& positions, double fps) {
  if (positions.rows() < 4) throw SequenceLengthError("jitter needs >= 4 frames");
  if (positions.cols() % 3 != 0) throw ShapeError("positions must be frames x 3J");
  const Eigen::Index joints = positions.cols() / 3;
  double sum = 0.0;
  for (Eigen::Index f = 3; f < positions.rows(); ++f) {
    for (Eigen::Index j = 0; j < joints; ++j) {
      const Vec3 jerk = positions.block<1, 3>(f, 3 * j).transpose() -
                        3.0 * positions.block<1, 3>(f - 1, 3 * j).transpose() +
                        3.0 * positions.block<1, 3>(f - 2, 3 * j).transpose() -
                        positions.block<1, 3>(f - 3, 3 * j).transpose();
      sum += jerk.norm();
    }
  }
  const double mean = sum / ((positions.rows() - 3.0) * joints);
  return mean * fps * fps * fps / 100.0;
}

double Jitter(const GlobalSequence& global, const std::vector<int>& joints,
              double fps, bool root_relative) {
  return Jitter(JointPositions(global, joints, root_relative), fps);
}

std::string ToString(DropoutPolicy p) {
  return p == DropoutPolicy::kZero ? "zero" : "freeze";
}

DropoutPolicy DropoutPolicyFromString(const std::string& s) {
  if (s == "zero") return DropoutPolicy::kZero;
  if (s == "freeze") return DropoutPolicy::kFreeze;
  throw ConfigError("unknown dropout policy: " + s);
}

DropoutResult ApplySensorDropout(const Matrix& observation, int sensors, int k,
                                 DropoutPolicy policy, uint64_t seed) {
  if (sensors < 0 || observation.cols() < sensors * kSensorChannels) {
    throw ShapeError("observation narrower than the sensor channels");
  }
  if (k < 0 || k > sensors) {
    throw ValidationError("missing sensor count " + std::to_string(k) +
                          " outside [0, " + std::to_string(sensors) + "]");
  }
  std::vector<int> order(sensors);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  DropoutResult out{observation, std::vector<int>(order.begin(), order.begin() + k)};
  std::sort(out.dropped.begin(), out.dropped.end());
  for (int s : out.dropped) {
    auto block = out.observation.middleCols(s * kSensorChannels, kSensorChannels);
    if (policy == DropoutPolicy::kZero || observation.rows() == 0) {
      block.setZero();
    } else {
      const RowVector first = block.row(0);
      block.rowwise() = first;
    }
  }
  return out;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& j : per_joint) {
    joints.push_back({{"joint", j.joint},
                      {"rotation_deg", j.rotation_deg},
                      {"position_cm", j.position_cm}});
  }
  return {{"mpjre_deg", {{"mean", mpjre_deg.mean}, {"std", mpjre_deg.std}}},
          {"mpjpe_cm", {{"mean", mpjpe_cm.mean}, {"std", mpjpe_cm.std}}},
          {"mpjve_cm_s", mpjve_cm_s},
          {"jitter_1e2_m_s3", jitter},
          {"gt_jitter_1e2_m_s3", gt_jitter},
          {"root_angle_error_deg", root_angle_error_deg},
          {"per_joint", joints},
          {"protocol",
           {{"joint_set", joint_set},
            {"rotation_frame", rotation_frame},
            {"alignment", alignment},
            {"dropped_sensors", dropped_sensors},
            {"dropout_policy", dropout_policy},
            {"frames", frames},
            {"fps", fps}}}};
}

std::string EvalReport::ToCsv() const {
  std::ostringstream out;
  out.precision(9);
  out << "metric,value\n";
  out << "mpjre_deg_mean," << mpjre_deg.mean << "\n";
  out << "mpjre_deg_std," << mpjre_deg.std << "\n";
  out << "mpjpe_cm_mean," << mpjpe_cm.mean << "\n";
  out << "mpjpe_cm_std," << mpjpe_cm.std << "\n";
  out << "mpjve_cm_s," << mpjve_cm_s << "\n";
  out << "jitter_1e2_m_s3," << jitter << "\n";
  out << "gt_jitter_1e2_m_s3," << gt_jitter << "\n";
  out << "root_angle_error_deg," << root_angle_error_deg << "\n";
  for (const auto& j : per_joint) {
    out << "rotation_deg." << j.joint << "," << j.rotation_deg << "\n";
    out << "position_cm." << j.joint << "," << j.position_cm << "\n";
  }
  return out.str();
}

EvalReport Evaluate(const PoseSequence& pred, const PoseSequence& gt,
                    BodySet body, RotationFrame frame) {
  CheckAligned(pred.frames(), gt.frames());
  const Skeleton& sk = Skeleton::Smpl();
  const GlobalSequence gp = ForwardKinematicsSequence(sk, pred);
  const GlobalSequence gg = ForwardKinematicsSequence(sk, gt);
  const std::vector<int> joints = EvaluationJoints(body);
  EvalReport r;
  r.joint_set = body == BodySet::kUpper ? "upper11" : "whole24";
  r.rotation_frame = frame == RotationFrame::kGlobal ? "global" : "local";
  r.frames = pred.frames();
  r.fps = pred.fps();
  r.mpjre_deg = Mpjre(pred, gt, joints, frame);
  r.mpjpe_cm = Mpjpe(gp, gg, joints);
  r.root_angle_error_deg = Mpjre(gp, gg, {kRootJoint}).mean;
  if (pred.frames() >= 2) r.mpjve_cm_s = Mpjve(gp, gg, joints, pred.fps());
  if (pred.frames() >= 4) {
    r.jitter = Jitter(gp, joints, pred.fps());
    r.gt_jitter = Jitter(gg, joints, pred.fps());
  }
  for (int j : joints) {
    JointError e;
    e.joint = sk.joint_names[j];
    e.rotation_deg = Mpjre(pred, gt, {j}, frame).mean;
    e.position_cm = Mpjpe(gp, gg, {j}).mean;
    r.per_joint.push_back(e);
  }
  return r;
}

EvalReport AverageReports(const std::vector<EvalReport>& reports) {
  EvalReport total;
  if (reports.empty()) return total;
  total = reports.front();
  total.mpjre_deg = {};
  total.mpjpe_cm = {};
  total.mpjve_cm_s = total.jitter = total.gt_jitter = total.root_angle_error_deg = 0.0;
  for (auto& j : total.per_joint) j.rotation_deg = j.position_cm = 0.0;
  double frames = 0.0;
  for (const auto& r : reports) {
    const double w = r.frames;
    frames += w;
    total.mpjre_deg.mean += w * r.mpjre_deg.mean;
    total.mpjre_deg.std += w * r.mpjre_deg.std;
    total.mpjpe_cm.mean += w * r.mpjpe_cm.mean;
    total.mpjpe_cm.std += w * r.mpjpe_cm.std;
    total.mpjve_cm_s += w * r.mpjve_cm_s;
    total.jitter += w * r.jitter;
    total.gt_jitter += w * r.gt_jitter;
    total.root_angle_error_deg += w * r.root_angle_error_deg;
    if (r.per_joint.size() != total.per_joint.size()) {
      throw ShapeError("reports use different joint sets");
    }
    for (size_t j = 0; j < r.per_joint.size(); ++j) {
      total.per_joint[j].rotation_deg += w * r.per_joint[j].rotation_deg;
      total.per_joint[j].position_cm += w * r.per_joint[j].position_cm;
    }
  }
  total.frames = static_cast<int>(frames);
  if (frames == 0.0) return total;
  for (double* v : {&total.mpjre_deg.mean, &total.mpjre_deg.std, &total.mpjpe_cm.mean,
                    &total.mpjpe_cm.std, &total.mpjve_cm_s, &total.jitter,
                    &total.gt_jitter, &total.root_angle_error_deg}) {
    *v /= frames;
  }
  for (auto& j : total.per_joint) {
    j.rotation_deg /= frames;
    j.position_cm /= frames;
  }
  return total;
}

std::vector<Rotation> MeanLocalPose(const std::vector<const PoseSequence*>& data) {
  std::vector<std::array<double, 6>> sum(kJointCount);
  for (auto& s : sum) s.fill(0.0);
  int count = 0;
  for (const PoseSequence* seq : data) {
    for (int f = 0; f < seq->frames(); ++f) {
      for (int j = 0; j < kJointCount; ++j) {
        const auto six = seq->rotation(f, j).six_d();
        for (int k = 0; k < 6; ++k) sum[j][k] += six[k];
      }
      ++count;
    }
  }
  if (count == 0) throw ValidationError("no frames to average");
  std::vector<Rotation> mean(kJointCount);
  for (int j = 0; j < kJointCount; ++j) {
    try {
      mean[j] = Rotation::FromSixD(sum[j]);
    } catch (const ValidationError&) {
      mean[j] = Rotation::Identity();
    }
  }
  return mean;
}

PoseSequence ConstantPose(const std::vector<Rotation>& local, int frames,
                          double fps) {
  if (local.size() != kJointCount) throw ShapeError("need 24 joint rotations");
  PoseSequence pose(frames, fps);
  for (int f = 0; f < frames; ++f) {
    pose.root_translation(f) = Vec3::Zero();
    for (int j = 0; j < kJointCount; ++j) pose.rotation(f, j) = local[j];
  }
  return pose;
}

}  // namespace looseimu
