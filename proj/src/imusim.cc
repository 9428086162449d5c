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

#include "looseimu/imusim.h"

#include <cmath>
#include <random>
#include <set>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

// Patch vertices in the sensor frame, unit spacing: +x, +y, -x, -y.
const std::array<Vec3, 4> kPatchLayout = {Vec3(1, 0, 0), Vec3(0, 1, 0),
                                          Vec3(-1, 0, 0), Vec3(0, -1, 0)};

void CheckSimulationInput(const PoseSequence& pose,
                          const std::vector<SensorPlacement>& placements) {
  if (placements.empty()) throw ValidationError("no sensor placements");
  ValidatePlacements(placements);
  if (pose.frames() < kMinSimulationFrames) {
    throw SequenceLengthError("IMU simulation needs at least " +
                              std::to_string(kMinSimulationFrames) +
                              " frames, got " + std::to_string(pose.frames()));
  }
}

std::vector<std::string> Ids(const std::vector<SensorPlacement>& placements) {
  std::vector<std::string> ids;
  for (const auto& p : placements) ids.push_back(p.sensor_id);
  return ids;
}

// Orientation from a 4-vertex patch via two cross products. Returns false
// when the patch is degenerate.
bool PatchFrame(const std::array<Vec3, 4>& v, Rotation* out) {
  const Vec3 e1 = v[0] - v[2];
  const Vec3 e2 = v[1] - v[3];
  const Vec3 normal = e1.cross(e2);
  const Vec3 third = normal.cross(e1);
  const double scale = e1.norm() * e2.norm();
  if (!(scale > 0.0) || normal.norm() < 1e-6 * scale || third.norm() == 0.0) {
    return false;
  }
  Mat3 m;
  m.col(0) = e1.normalized();
  m.col(1) = third.normalized();
  m.col(2) = normal.normalized();
  *out = Rotation::FromMatrix(m);
  return true;
}

void FillAcceleration(SensorTrack& track, int s, const std::vector<Vec3>& pos,
                      const SimulationOptions& options) {
  const std::vector<Vec3> acc = FiniteDifferenceAcceleration(pos, track.fps());
  for (int f = 0; f < track.frames(); ++f) {
    track.acc(f, s) = acc[f];
    if (options.add_gravity) track.acc(f, s).z() += kGravity;
  }
}

}  // namespace

std::vector<SensorPlacement> SixSensorSet() {
  return {
      {"left_forearm", kLeftElbow, Vec3(0.0, 0.13, 0.04)},
      {"right_forearm", kRightElbow, Vec3(0.0, -0.13, 0.04)},
      {"sternum", kSpine3, Vec3(0.10, 0.0, 0.05)},
      {"pelvis", kPelvis, Vec3(0.11, 0.0, 0.0)},
      {"left_lower_leg", kLeftKnee, Vec3(0.05, 0.0, -0.20)},
      {"right_lower_leg", kRightKnee, Vec3(0.05, 0.0, -0.20)},
  };
}

std::vector<SensorPlacement> UpperSensorSet() {
  return {
      {"left_forearm", kLeftElbow, Vec3(0.0, 0.13, 0.04)},
      {"right_forearm", kRightElbow, Vec3(0.0, -0.13, 0.04)},
      {"back", kSpine3, Vec3(-0.09, 0.0, 0.05)},
      {"waist", kPelvis, Vec3(0.11, 0.0, 0.0)},
  };
}

void ValidatePlacements(const std::vector<SensorPlacement>& placements) {
  std::set<std::string> seen;
  for (const auto& p : placements) {
    if (p.attach_joint < 0 || p.attach_joint >= kJointCount) {
      throw ValidationError("sensor " + p.sensor_id + " has invalid joint");
    }
    if (!seen.insert(p.sensor_id).second) {
      throw ValidationError("duplicate sensor id " + p.sensor_id);
    }
  }
}

std::string ToString(Tightness t) {
  switch (t) {
    case Tightness::kTight: return "tight";
    case Tightness::kLooseSim: return "loose_sim";
    case Tightness::kLooseGenerated: return "loose_generated";
    case Tightness::kLooseBlended: return "loose_blended";
    case Tightness::kReal: return "real";
  }
  return "tight";
}

Tightness TightnessFromString(const std::string& s) {
  for (Tightness t : {Tightness::kTight, Tightness::kLooseSim,
                      Tightness::kLooseGenerated, Tightness::kLooseBlended,
                      Tightness::kReal}) {
    if (ToString(t) == s) return t;
  }
  throw ValidationError("unknown tightness tag: " + s);
}

SensorTrack::SensorTrack(int frames, std::vector<std::string> sensor_ids,
                         double fps, Tightness tag)
    : frames_(frames),
      fps_(fps),
      tag_(tag),
      sensor_ids_(std::move(sensor_ids)),
      acc_(static_cast<size_t>(frames) * sensor_ids_.size(), Vec3::Zero()),
      ori_(static_cast<size_t>(frames) * sensor_ids_.size()) {}

void SensorTrack::CheckSameShape(const SensorTrack& other) const {
  if (frames_ != other.frames_ || sensors() != other.sensors() ||
      fps_ != other.fps_) {
    throw ShapeError("sensor tracks differ in frames, sensors or fps");
  }
}

void GarmentProxy::Validate() const {
  if (!(stiffness > 0.0)) throw ValidationError("stiffness must be > 0");
  if (!(damping > 0.0 && damping <= 2.0))
    throw ValidationError("damping ratio must be in (0, 2]");
  if (!(patch_scale > 0.0)) throw ValidationError("patch_scale must be > 0");
  if (gamma < 0.0 || gamma > 24.0)
    throw ValidationError("gamma must be in [0, 24]");
  if (height_cm < 140.0 || height_cm > 210.0)
    throw ValidationError("height outside [140, 210] cm");
  if (bmi < 15.0 || bmi > 40.0) throw ValidationError("bmi outside [15, 40]");
  if (excitation < 0.0) throw ValidationError("excitation must be >= 0");
}

double GarmentProxy::Looseness() const {
  return gamma / 24.0 + 0.5 * std::abs(bmi - 22.0) / 8.0;
}

std::vector<GarmentProxy> DefaultGarmentGrid() {
  std::vector<GarmentProxy> grid;
  for (double g : {0.0, 5.0, 10.0, 15.0, 20.0, 24.0}) {
    GarmentProxy p;
    p.gamma = g;
    p.height_cm = 180.0;
    p.bmi = 22.0;
    grid.push_back(p);
  }
  GarmentProxy short_heavy;
  short_heavy.gamma = 0.0;
  short_heavy.height_cm = 160.0;
  short_heavy.bmi = 30.0;
  grid.push_back(short_heavy);
  return grid;
}

GarmentDisplacementProvider::PatchTrajectory SpringPatchProvider::Displace(
    const PatchTrajectory& anchors, double fps, uint64_t seed) const {
  if (proxy_.rigid) return anchors;
  const int frames = static_cast<int>(anchors.size());
  PatchTrajectory out(frames);
  if (frames == 0) return out;

  const double loose = proxy_.Looseness();
  const double k = proxy_.stiffness / ((1.0 + 4.0 * loose) * (1.0 + 4.0 * loose));
  const double c = 2.0 * proxy_.damping * std::sqrt(k);
  const double noise_gain = proxy_.excitation * proxy_.gamma / 24.0;
  const double frame_dt = 1.0 / fps;
  const int substeps = std::max(1, substeps_);
  const double dt = frame_dt / substeps;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::array<Vec3, 4> x = anchors[0];
  std::array<Vec3, 4> v;
  for (int i = 0; i < 4; ++i) {
    v[i] = frames > 1 ? Vec3((anchors[1][i] - anchors[0][i]) * fps)
                      : Vec3(Vec3::Zero());
  }
  out[0] = x;
  for (int f = 1; f < frames; ++f) {
    for (int i = 0; i < 4; ++i) {
      const Vec3 anchor_vel = (anchors[f][i] - anchors[f - 1][i]) * fps;
      Vec3 kick = Vec3::Zero();
      if (noise_gain > 0.0) {
        const double sigma = noise_gain * anchor_vel.norm();
        kick = Vec3(normal(rng), normal(rng), normal(rng)) * sigma;
      }
      for (int s = 1; s <= substeps; ++s) {
        const double a = static_cast<double>(s) / substeps;
        const Vec3 target =
            (1.0 - a) * anchors[f - 1][i] + a * anchors[f][i] + kick;
        const Vec3 accel = k * (target - x[i]) + c * (anchor_vel - v[i]);
        v[i] += dt * accel;
        x[i] += dt * v[i];
      }
    }
    out[f] = x;
  }
  return out;
}

std::vector<Vec3> FiniteDifferenceAcceleration(const std::vector<Vec3>& pos,
                                               double fps) {
  const int n = static_cast<int>(pos.size());
  if (n < 3) throw SequenceLengthError("acceleration stencil needs 3 frames");
  std::vector<Vec3> acc(n);
  const double fps2 = fps * fps;
  for (int f = 1; f + 1 < n; ++f) {
    acc[f] = (pos[f + 1] - 2.0 * pos[f] + pos[f - 1]) * fps2;
  }
  acc[0] = acc[1];
  acc[n - 1] = acc[n - 2];
  return acc;
}

SensorTrack SimulateTight(const PoseSequence& pose,
                          const std::vector<SensorPlacement>& placements,
                          const SimulationOptions& options) {
  CheckSimulationInput(pose, placements);
  const Skeleton& skel = Skeleton::Smpl();
  const int frames = pose.frames();
  const int ns = static_cast<int>(placements.size());
  SensorTrack track(frames, Ids(placements), pose.fps(), Tightness::kTight);
  track.set_gravity_included(options.add_gravity);
  std::vector<std::vector<Vec3>> pos(ns, std::vector<Vec3>(frames));
  for (int f = 0; f < frames; ++f) {
    const GlobalPose g =
        ForwardKinematics(skel, pose.frame(f), pose.root_translation(f));
    for (int s = 0; s < ns; ++s) {
      const int j = placements[s].attach_joint;
      track.ori(f, s) = g.rotation[j];
      pos[s][f] = g.position[j] + g.rotation[j] * placements[s].local_offset;
    }
  }
  for (int s = 0; s < ns; ++s) FillAcceleration(track, s, pos[s], options);
  return track;
}

LooseSimulation SimulateLoose(const PoseSequence& pose,
                              const std::vector<SensorPlacement>& placements,
                              const GarmentProxy& proxy, uint64_t seed,
                              const SimulationOptions& options) {
  proxy.Validate();
  SpringPatchProvider provider(proxy, options.substeps);
  return SimulateLoose(pose, placements, provider, seed, options);
}

LooseSimulation SimulateLoose(const PoseSequence& pose,
                              const std::vector<SensorPlacement>& placements,
                              const GarmentDisplacementProvider& provider,
                              uint64_t seed, const SimulationOptions& options) {
  CheckSimulationInput(pose, placements);
  const Skeleton& skel = Skeleton::Smpl();
  const int frames = pose.frames();
  const int ns = static_cast<int>(placements.size());
  const double half_spacing = provider.PatchScale();

  std::vector<GarmentDisplacementProvider::PatchTrajectory> anchors(
      ns, GarmentDisplacementProvider::PatchTrajectory(frames));
  std::vector<Rotation> first_ori(ns);
  for (int f = 0; f < frames; ++f) {
    const GlobalPose g =
        ForwardKinematics(skel, pose.frame(f), pose.root_translation(f));
    for (int s = 0; s < ns; ++s) {
      const int j = placements[s].attach_joint;
      const Vec3 center =
          g.position[j] + g.rotation[j] * placements[s].local_offset;
      for (int v = 0; v < 4; ++v) {
        anchors[s][f][v] = center + g.rotation[j] * (kPatchLayout[v] * half_spacing);
      }
      if (f == 0) first_ori[s] = g.rotation[j];
    }
  }

  LooseSimulation out;
  out.track = SensorTrack(frames, Ids(placements), pose.fps(),
                          Tightness::kLooseSim);
  out.track.set_gravity_included(options.add_gravity);
  for (int s = 0; s < ns; ++s) {
    std::seed_seq seq{seed, static_cast<uint64_t>(s), uint64_t{0x6c6f6f7365}};
    std::array<uint32_t, 2> words;
    seq.generate(words.begin(), words.end());
    const uint64_t sensor_seed = (uint64_t{words[0]} << 32) | words[1];
    const auto patch = provider.Displace(anchors[s], pose.fps(), sensor_seed);
    std::vector<Vec3> centroid(frames);
    Rotation previous = first_ori[s];
    for (int f = 0; f < frames; ++f) {
      const auto& p = patch[f];
      centroid[f] = 0.25 * (p[0] + p[1] + p[2] + p[3]);
      Rotation r;
      if (PatchFrame(p, &r)) {
        previous = r;
      } else {
        ++out.degenerate_frames;
      }
      out.track.ori(f, s) = previous;
    }
    FillAcceleration(out.track, s, centroid, options);
  }
  return out;
}

std::vector<double> OffsetReport(const SensorTrack& tight,
                                 const SensorTrack& loose) {
  tight.CheckSameShape(loose);
  std::vector<double> mean(tight.sensors(), 0.0);
  if (tight.frames() == 0) return mean;
  for (int s = 0; s < tight.sensors(); ++s) {
    double sum = 0.0;
    for (int f = 0; f < tight.frames(); ++f) {
      sum += AngularOffsetDeg(tight.ori(f, s), loose.ori(f, s));
    }
    mean[s] = sum / tight.frames();
  }
  return mean;
}

}  // namespace looseimu
