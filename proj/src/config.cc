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

#include "looseimu/config.h"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

void RejectUnknown(const YAML::Node& node, const std::string& where,
                   const std::set<std::string>& known) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError("unknown key " + where + "." + key);
  }
}

template <typename T>
void Read(const YAML::Node& node, const char* key, T* out) {
  if (node[key]) *out = node[key].as<T>();
}

}  // namespace

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("hash_error", "SHA-256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i)
    out << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  return out.str();
}

RunConfig RunConfig::FromYaml(const std::string& text) {
  RunConfig c;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (root.IsNull()) return c;
  try {
    RejectUnknown(root, "config",
                  {"seed", "profile", "fps", "window", "stride", "diffusion",
                   "train", "garment", "simulation", "motion", "inference"});
    Read(root, "seed", &c.seed);
    if (root["profile"]) c.profile = ProfileFromString(root["profile"].as<std::string>());
    Read(root, "fps", &c.fps);
    Read(root, "window", &c.window);
    Read(root, "stride", &c.stride);

    if (const auto d = root["diffusion"]) {
      RejectUnknown(d, "diffusion", {"steps", "schedule", "sampler_steps"});
      Read(d, "steps", &c.diffusion_steps);
      if (d["schedule"]) c.schedule = ScheduleKindFromString(d["schedule"].as<std::string>());
      Read(d, "sampler_steps", &c.sampler_steps);
    }
    if (const auto t = root["train"]) {
      RejectUnknown(t, "train",
                    {"steps", "batch", "learning_rate", "beta1", "beta2",
                     "epsilon", "grad_clip", "consistency_scale",
                     "sensor_dropout", "log_every", "time_budget_seconds",
                     "weights", "ablation"});
      Read(t, "steps", &c.train.steps);
      Read(t, "batch", &c.train.batch);
      Read(t, "learning_rate", &c.train.optimizer.learning_rate);
      Read(t, "beta1", &c.train.optimizer.beta1);
      Read(t, "beta2", &c.train.optimizer.beta2);
      Read(t, "epsilon", &c.train.optimizer.epsilon);
      Read(t, "grad_clip", &c.train.optimizer.grad_clip);
      Read(t, "consistency_scale", &c.train.consistency_scale);
      Read(t, "sensor_dropout", &c.train.sensor_dropout);
      Read(t, "log_every", &c.train.log_every);
      Read(t, "time_budget_seconds", &c.train.time_budget_seconds);
      if (const auto w = t["weights"]) {
        RejectUnknown(w, "train.weights",
                      {"root_rotation", "joint_rotation", "extremity_position",
                       "other_position", "tight", "consistency", "loose_recon"});
        auto& lw = c.train.weights;
        Read(w, "root_rotation", &lw.root_rotation);
        Read(w, "joint_rotation", &lw.joint_rotation);
        Read(w, "extremity_position", &lw.extremity_position);
        Read(w, "other_position", &lw.other_position);
        Read(w, "tight", &lw.tight);
        Read(w, "consistency", &lw.consistency);
        Read(w, "loose_recon", &lw.loose_recon);
      }
      if (const auto a = t["ablation"]) {
        RejectUnknown(a, "train.ablation",
                      {"pose", "velocity", "acceleration", "jerk",
                       "position_velocity"});
        auto& ab = c.train.ablation;
        Read(a, "pose", &ab.pose);
        const char* orders[3] = {"velocity", "acceleration", "jerk"};
        for (int o = 0; o < 3; ++o) {
          if (a[orders[o]]) ab.rotation_diff[o].fill(a[orders[o]].as<double>());
        }
        if (a["position_velocity"])
          ab.position_velocity.fill(a["position_velocity"].as<double>());
      }
    }
    if (const auto g = root["garment"]) {
      RejectUnknown(g, "garment",
                    {"gamma", "height_cm", "bmi", "stiffness", "damping",
                     "patch_scale", "excitation", "rigid"});
      Read(g, "gamma", &c.garment.gamma);
      Read(g, "height_cm", &c.garment.height_cm);
      Read(g, "bmi", &c.garment.bmi);
      Read(g, "stiffness", &c.garment.stiffness);
      Read(g, "damping", &c.garment.damping);
      Read(g, "patch_scale", &c.garment.patch_scale);
      Read(g, "excitation", &c.garment.excitation);
      Read(g, "rigid", &c.garment.rigid);
    }
    if (const auto s = root["simulation"]) {
      RejectUnknown(s, "simulation", {"add_gravity", "substeps"});
      Read(s, "add_gravity", &c.simulation.add_gravity);
      Read(s, "substeps", &c.simulation.substeps);
    }
    if (const auto m = root["motion"]) {
      RejectUnknown(m, "motion", {"minutes"});
      Read(m, "minutes", &c.motion_minutes);
    }
    if (const auto i = root["inference"]) {
      RejectUnknown(i, "inference", {"clamp_history", "history_blend"});
      Read(i, "clamp_history", &c.clamp_history);
      Read(i, "history_blend", &c.history_blend);
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
  }
  c.Validate();
  return c;
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoCode::kNotFound, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FromYaml(ss.str());
}

void RunConfig::Validate() const {
  if (fps <= 0) throw ConfigError("fps must be positive");
  if (window < 2) throw ConfigError("window must be >= 2");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (diffusion_steps < 2) throw ConfigError("diffusion.steps must be >= 2");
  if (sampler_steps < 1 || sampler_steps > diffusion_steps)
    throw ConfigError("diffusion.sampler_steps must be in [1, steps]");
  if (train.batch < 1 || train.steps < 0)
    throw ConfigError("train.batch must be >= 1 and train.steps >= 0");
  if (train.optimizer.learning_rate < 0)
    throw ConfigError("train.learning_rate must be >= 0");
  if (train.sensor_dropout < 0 || train.sensor_dropout > 1)
    throw ConfigError("train.sensor_dropout must be in [0, 1]");
  if (train.consistency_scale < 0)
    throw ConfigError("train.consistency_scale must be >= 0");
  if (history_blend < 0 || history_blend > 1)
    throw ConfigError("inference.history_blend must be in [0, 1]");
  if (motion_minutes <= 0) throw ConfigError("motion.minutes must be positive");
  train.weights.Validate();
  garment.Validate();
}

std::string RunConfig::ToYaml() const {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << seed;
  e << YAML::Key << "profile" << YAML::Value << ToString(profile);
  e << YAML::Key << "fps" << YAML::Value << fps;
  e << YAML::Key << "window" << YAML::Value << window;
  e << YAML::Key << "stride" << YAML::Value << stride;
  e << YAML::Key << "diffusion" << YAML::Value << YAML::BeginMap
    << YAML::Key << "steps" << YAML::Value << diffusion_steps
    << YAML::Key << "schedule" << YAML::Value << ToString(schedule)
    << YAML::Key << "sampler_steps" << YAML::Value << sampler_steps
    << YAML::EndMap;
  const auto& w = train.weights;
  const auto& ab = train.ablation;
  e << YAML::Key << "train" << YAML::Value << YAML::BeginMap
    << YAML::Key << "steps" << YAML::Value << train.steps
    << YAML::Key << "batch" << YAML::Value << train.batch
    << YAML::Key << "learning_rate" << YAML::Value << train.optimizer.learning_rate
    << YAML::Key << "beta1" << YAML::Value << train.optimizer.beta1
    << YAML::Key << "beta2" << YAML::Value << train.optimizer.beta2
    << YAML::Key << "epsilon" << YAML::Value << train.optimizer.epsilon
    << YAML::Key << "grad_clip" << YAML::Value << train.optimizer.grad_clip
    << YAML::Key << "consistency_scale" << YAML::Value << train.consistency_scale
    << YAML::Key << "sensor_dropout" << YAML::Value << train.sensor_dropout
    << YAML::Key << "log_every" << YAML::Value << train.log_every
    << YAML::Key << "time_budget_seconds" << YAML::Value << train.time_budget_seconds
    << YAML::Key << "weights" << YAML::Value << YAML::BeginMap
    << YAML::Key << "root_rotation" << YAML::Value << w.root_rotation
    << YAML::Key << "joint_rotation" << YAML::Value << w.joint_rotation
    << YAML::Key << "extremity_position" << YAML::Value << w.extremity_position
    << YAML::Key << "other_position" << YAML::Value << w.other_position
    << YAML::Key << "tight" << YAML::Value << w.tight
    << YAML::Key << "consistency" << YAML::Value << w.consistency
    << YAML::Key << "loose_recon" << YAML::Value << w.loose_recon
    << YAML::EndMap
    << YAML::Key << "ablation" << YAML::Value << YAML::BeginMap
    << YAML::Key << "pose" << YAML::Value << ab.pose
    << YAML::Key << "velocity" << YAML::Value << ab.rotation_diff[0][0]
    << YAML::Key << "acceleration" << YAML::Value << ab.rotation_diff[1][0]
    << YAML::Key << "jerk" << YAML::Value << ab.rotation_diff[2][0]
    << YAML::Key << "position_velocity" << YAML::Value << ab.position_velocity[0]
    << YAML::EndMap << YAML::EndMap;
  e << YAML::Key << "garment" << YAML::Value << YAML::BeginMap
    << YAML::Key << "gamma" << YAML::Value << garment.gamma
    << YAML::Key << "height_cm" << YAML::Value << garment.height_cm
    << YAML::Key << "bmi" << YAML::Value << garment.bmi
    << YAML::Key << "stiffness" << YAML::Value << garment.stiffness
    << YAML::Key << "damping" << YAML::Value << garment.damping
    << YAML::Key << "patch_scale" << YAML::Value << garment.patch_scale
    << YAML::Key << "excitation" << YAML::Value << garment.excitation
    << YAML::Key << "rigid" << YAML::Value << garment.rigid << YAML::EndMap;
  e << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap
    << YAML::Key << "add_gravity" << YAML::Value << simulation.add_gravity
    << YAML::Key << "substeps" << YAML::Value << simulation.substeps
    << YAML::EndMap;
  e << YAML::Key << "motion" << YAML::Value << YAML::BeginMap
    << YAML::Key << "minutes" << YAML::Value << motion_minutes << YAML::EndMap;
  e << YAML::Key << "inference" << YAML::Value << YAML::BeginMap
    << YAML::Key << "clamp_history" << YAML::Value << clamp_history
    << YAML::Key << "history_blend" << YAML::Value << history_blend
    << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string RunConfig::Hash() const { return Sha256Hex(ToYaml()); }

}  // namespace looseimu
