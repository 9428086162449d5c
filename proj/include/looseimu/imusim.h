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

#ifndef LOOSEIMU_IMUSIM_H_
#define LOOSEIMU_IMUSIM_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "looseimu/kinematics.h"

namespace looseimu {

inline constexpr double kGravity = 9.81;

struct SensorPlacement {
  std::string sensor_id;
  int attach_joint = 0;
  Vec3 local_offset = Vec3::Zero();
};

// Left/right forearm, sternum, pelvis, left/right lower leg.
std::vector<SensorPlacement> SixSensorSet();
// Left/right forearm, back, waist.
std::vector<SensorPlacement> UpperSensorSet();
// Throws ValidationError on bad joints or duplicate ids.
void ValidatePlacements(const std::vector<SensorPlacement>& placements);

enum class Tightness { kTight, kLooseSim, kLooseGenerated, kLooseBlended, kReal };
std::string ToString(Tightness t);
Tightness TightnessFromString(const std::string& s);

// Per-frame, per-sensor global acceleration (m/s^2) and orientation.
class SensorTrack {
 public:
  SensorTrack() = default;
  SensorTrack(int frames, std::vector<std::string> sensor_ids, double fps,
              Tightness tag);

  int frames() const { return frames_; }
  int sensors() const { return static_cast<int>(sensor_ids_.size()); }
  double fps() const { return fps_; }
  Tightness tag() const { return tag_; }
  void set_tag(Tightness t) { tag_ = t; }
  bool gravity_included() const { return gravity_included_; }
  void set_gravity_included(bool g) { gravity_included_ = g; }
  const std::vector<std::string>& sensor_ids() const { return sensor_ids_; }

  Vec3& acc(int f, int s) { return acc_[Index(f, s)]; }
  const Vec3& acc(int f, int s) const { return acc_[Index(f, s)]; }
  Rotation& ori(int f, int s) { return ori_[Index(f, s)]; }
  const Rotation& ori(int f, int s) const { return ori_[Index(f, s)]; }

  // Throws ShapeError unless both tracks have the same shape and rate.
  void CheckSameShape(const SensorTrack& other) const;

 private:
  size_t Index(int f, int s) const {
    return static_cast<size_t>(f) * sensor_ids_.size() + s;
  }
  int frames_ = 0;
  double fps_ = 30.0;
  Tightness tag_ = Tightness::kTight;
  bool gravity_included_ = false;
  std::vector<std::string> sensor_ids_;
  std::vector<Vec3> acc_;
  std::vector<Rotation> ori_;
};

// Procedural stand-in for a garment simulator: a 4-vertex spring-damper
// patch around each sensor.
struct GarmentProxy {
  double gamma = 0.0;       // style looseness, [0, 24]
  double height_cm = 180.0;
  double bmi = 22.0;
  double stiffness = 400.0;  // 1/s^2
  double damping = 0.5;      // damping ratio
  double patch_scale = 0.05;  // m
  // Std of the motion-driven target excitation per unit gamma/24, in meters
  // per (m/s) of anchor speed.
  double excitation = 0.02;
  // Vertices glued to their anchors; reproduces tight data.
  bool rigid = false;

  void Validate() const;
  // Monotone in gamma and in |bmi - 22|; 0 for the tightest garment.
  double Looseness() const;
};

// Seven garment configurations used for garment-aware corpora: six styles
// on a tall/thin body and one neutral style on a short/heavy body.
std::vector<GarmentProxy> DefaultGarmentGrid();

struct SimulationOptions {
  bool add_gravity = false;
  int substeps = 8;
};

// Maps the rigid body-anchored trajectories of patch vertices to the
// displaced garment trajectories. anchors[f][v] for frame f, vertex v.
class GarmentDisplacementProvider {
 public:
  using PatchTrajectory = std::vector<std::array<Vec3, 4>>;
  virtual ~GarmentDisplacementProvider() = default;
  virtual PatchTrajectory Displace(const PatchTrajectory& anchors,
                                   double fps, uint64_t seed) const = 0;
  // Half the distance between opposite patch vertices, meters.
  virtual double PatchScale() const = 0;
};

class SpringPatchProvider : public GarmentDisplacementProvider {
 public:
  SpringPatchProvider(GarmentProxy proxy, int substeps)
      : proxy_(proxy), substeps_(substeps) {}
  PatchTrajectory Displace(const PatchTrajectory& anchors, double fps,
                           uint64_t seed) const override;
  double PatchScale() const override { return proxy_.patch_scale; }

 private:
  GarmentProxy proxy_;
  int substeps_;
};

inline constexpr int kMinSimulationFrames = 5;

SensorTrack SimulateTight(const PoseSequence& pose,
                          const std::vector<SensorPlacement>& placements,
                          const SimulationOptions& options = {});

struct LooseSimulation {
  SensorTrack track;
  int degenerate_frames = 0;
};

LooseSimulation SimulateLoose(const PoseSequence& pose,
                              const std::vector<SensorPlacement>& placements,
                              const GarmentProxy& proxy, uint64_t seed,
                              const SimulationOptions& options = {});

LooseSimulation SimulateLoose(const PoseSequence& pose,
                              const std::vector<SensorPlacement>& placements,
                              const GarmentDisplacementProvider& provider,
                              uint64_t seed,
                              const SimulationOptions& options = {});

// Mean angular offset per sensor, degrees.
std::vector<double> OffsetReport(const SensorTrack& tight,
                                 const SensorTrack& loose);

// Second central difference times fps^2 with replicated endpoints.
std::vector<Vec3> FiniteDifferenceAcceleration(const std::vector<Vec3>& pos,
                                               double fps);

}  // namespace looseimu

#endif  // LOOSEIMU_IMUSIM_H_
