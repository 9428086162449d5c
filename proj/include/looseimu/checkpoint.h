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

#ifndef LOOSEIMU_CHECKPOINT_H_
#define LOOSEIMU_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "looseimu/model.h"
#include "looseimu/trainer.h"

namespace looseimu {

inline constexpr uint32_t kCheckpointVersion = 1;
inline constexpr char kCheckpointMagic[8] = {'L', 'I', 'M', 'U',
                                             'C', 'K', 'P', 'T'};

struct CheckpointMeta {
  std::string config_hash;
  uint64_t seed = 0;
  nlohmann::json extra = nlohmann::json::object();
};

struct Checkpoint {
  DiffusionModel model;
  CheckpointMeta meta;
  std::optional<AdamState> adam;
};

// Binary layout (docs/formats.md): magic, u32 version, u64 header length,
// JSON header, then float32 tensors in header order. Written atomically.
void SaveCheckpoint(const std::filesystem::path& path,
                    const DiffusionModel& model, const CheckpointMeta& meta,
                    const AdamState* adam = nullptr);
// Throws IoError (not found, version mismatch, truncated, parse).
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace looseimu

#endif  // LOOSEIMU_CHECKPOINT_H_
