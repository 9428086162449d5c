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

#ifndef LOOSEIMU_CONTAINER_H_
#define LOOSEIMU_CONTAINER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "looseimu/imusim.h"
#include "looseimu/kinematics.h"
#include "looseimu/tensor.h"

namespace looseimu {

inline constexpr int kContainerSchemaVersion = 1;

using FloatMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ChannelGroup {
  std::string unit;
  FloatMatrix data;  // frames x width
};

// One recording on disk: a directory with manifest.json and one
// little-endian float32 row-major blob per channel group. The layout is
// documented in docs/formats.md.
struct MotionContainer {
  int schema_version = kContainerSchemaVersion;
  double fps = 30.0;
  int frames = 0;
  std::map<std::string, ChannelGroup> channels;
  std::vector<std::string> provenance;
  std::optional<GarmentProxy> garment;
  bool gravity_included = false;
  std::vector<uint64_t> seed_lineage;
  std::string config_hash;
  // Free-form metadata (sensor ids, blend alphas, frame ranges).
  nlohmann::json extra = nlohmann::json::object();

  // Throws ShapeError if any group's row count differs from `frames`.
  void Validate() const;
  const ChannelGroup& channel(const std::string& name) const;
};

// Writes into a temporary sibling directory and renames it into place.
void SaveContainer(const MotionContainer& container,
                   const std::filesystem::path& dir);
// Throws IoError: not found, parse, version mismatch, truncated blob or
// shape mismatch.
MotionContainer LoadContainer(const std::filesystem::path& dir);

// "pose.root_translation" (frames x 3, m) and "pose.rotations"
// (frames x 96, local quaternions w,x,y,z per joint).
void PutPose(const PoseSequence& pose, MotionContainer* container);
PoseSequence GetPose(const MotionContainer& container);

// "<prefix>.acc" (frames x 3K) and "<prefix>.ori" (frames x 4K); sensor
// ids and the tightness tag go to extra["tracks"][prefix].
void PutTrack(const SensorTrack& track, const std::string& prefix,
              MotionContainer* container);
SensorTrack GetTrack(const MotionContainer& container,
                     const std::string& prefix);
bool HasTrack(const MotionContainer& container, const std::string& prefix);

// Lowercase hex SHA-256 of the manifest plus every blob, in name order.
std::string ContainerDigest(const MotionContainer& container);

// Writes `text` to `path` through a temporary file and a rename.
void AtomicWriteText(const std::filesystem::path& path,
                     const std::string& text);

}  // namespace looseimu

#endif  // LOOSEIMU_CONTAINER_H_
