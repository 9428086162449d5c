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

#ifndef LOOSEIMU_CONFIG_H_
#define LOOSEIMU_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "looseimu/imusim.h"
#include "looseimu/model.h"
#include "looseimu/trainer.h"

namespace looseimu {

// Everything a CLI run depends on. Loaded from YAML; every key is
// optional and unknown keys are rejected. Schema in docs/formats.md.
struct RunConfig {
  uint64_t seed = 0;
  Profile profile = Profile::kTiny;
  double fps = 30.0;
  int window = 60;
  int stride = 10;

  int diffusion_steps = 1000;
  ScheduleKind schedule = ScheduleKind::kCosine;
  int sampler_steps = 5;

  TrainConfig train;
  GarmentProxy garment;
  SimulationOptions simulation;
  double motion_minutes = 20.0;

  bool clamp_history = true;
  // Weight of committed history when clamping the x0 estimate; 1 is a
  // hard clamp.
  double history_blend = 1.0;

  static RunConfig FromYaml(const std::string& text);
  static RunConfig Load(const std::filesystem::path& path);
  // Canonical YAML with every key in a fixed order.
  std::string ToYaml() const;
  // SHA-256 of ToYaml().
  std::string Hash() const;
  void Validate() const;
};

std::string Sha256Hex(const std::string& bytes);

}  // namespace looseimu

#endif  // LOOSEIMU_CONFIG_H_
