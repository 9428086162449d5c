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

#include "looseimu/container.h"

#include <bit>
#include <fstream>
#include <random>
#include <sstream>

#include "looseimu/config.h"
#include "looseimu/errors.h"

namespace looseimu {
namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "blob I/O assumes a little-endian host");

namespace {

json ManifestJson(const MotionContainer& c) {
  json m;
  m["schema_version"] = c.schema_version;
  m["fps"] = c.fps;
  m["frames"] = c.frames;
  json channels = json::object();
  for (const auto& [name, group] : c.channels) {
    channels[name] = {{"rows", group.data.rows()},
                      {"cols", group.data.cols()},
                      {"unit", group.unit},
                      {"file", name + ".f32"},
                      {"dtype", "float32le"}};
  }
  m["channels"] = channels;
  m["provenance"] = c.provenance;
  if (c.garment) {
    m["garment"] = {{"gamma", c.garment->gamma},
                    {"height_cm", c.garment->height_cm},
                    {"bmi", c.garment->bmi}};
  } else {
    m["garment"] = nullptr;
  }
  m["gravity_included"] = c.gravity_included;
  m["seed_lineage"] = c.seed_lineage;
  m["config_hash"] = c.config_hash;
  m["extra"] = c.extra;
  return m;
}

std::string BlobBytes(const FloatMatrix& data) {
  return std::string(reinterpret_cast<const char*>(data.data()),
                     sizeof(float) * static_cast<size_t>(data.size()));
}

void WriteFile(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoCode::kWrite, "cannot write " + path.string());
}

}  // namespace

void MotionContainer::Validate() const {
  if (frames < 0) throw ShapeError("negative frame count");
  for (const auto& [name, group] : channels) {
    if (group.data.rows() != frames) {
      throw ShapeError("channel '" + name + "' has " +
                       std::to_string(group.data.rows()) + " rows, expected " +
                       std::to_string(frames));
    }
    if (name.empty() || name.find('/') != std::string::npos) {
      throw ValidationError("invalid channel name '" + name + "'");
    }
  }
}

const ChannelGroup& MotionContainer::channel(const std::string& name) const {
  auto it = channels.find(name);
  if (it == channels.end()) {
    throw IoError(IoCode::kNotFound, "container has no channel '" + name + "'");
  }
  return it->second;
}

void AtomicWriteText(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  WriteFile(tmp, text);
  fs::rename(tmp, path);
}

void SaveContainer(const MotionContainer& container, const fs::path& dir) {
  container.Validate();
  const fs::path tmp = dir.string() + ".tmp-" + std::to_string(std::random_device{}());
  std::error_code ec;
  fs::remove_all(tmp, ec);
  if (!fs::create_directories(tmp, ec) && ec) {
    throw IoError(IoCode::kWrite, "cannot create " + tmp.string());
  }
  WriteFile(tmp / "manifest.json", ManifestJson(container).dump(2) + "\n");
  for (const auto& [name, group] : container.channels)
    WriteFile(tmp / (name + ".f32"), BlobBytes(group.data));
  fs::remove_all(dir, ec);
  fs::rename(tmp, dir, ec);
  if (ec) throw IoError(IoCode::kWrite, "cannot move container into " + dir.string());
}

MotionContainer LoadContainer(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path);
  if (!in) throw IoError(IoCode::kNotFound, "missing " + manifest_path.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(IoCode::kParse, manifest_path.string() + ": " + e.what());
  }
  MotionContainer c;
  try {
    c.schema_version = m.at("schema_version").get<int>();
    if (c.schema_version != kContainerSchemaVersion) {
      throw IoError(IoCode::kVersionMismatch,
                    "container schema " + std::to_string(c.schema_version) +
                        ", this build reads " +
                        std::to_string(kContainerSchemaVersion));
    }
    c.fps = m.at("fps").get<double>();
    c.frames = m.at("frames").get<int>();
    c.provenance = m.at("provenance").get<std::vector<std::string>>();
    if (!m.at("garment").is_null()) {
      GarmentProxy g;
      g.gamma = m["garment"].at("gamma").get<double>();
      g.height_cm = m["garment"].at("height_cm").get<double>();
      g.bmi = m["garment"].at("bmi").get<double>();
      c.garment = g;
    }
    c.gravity_included = m.at("gravity_included").get<bool>();
    c.seed_lineage = m.at("seed_lineage").get<std::vector<uint64_t>>();
    c.config_hash = m.at("config_hash").get<std::string>();
    c.extra = m.value("extra", json::object());
    for (const auto& [name, spec] : m.at("channels").items()) {
      const auto rows = spec.at("rows").get<Eigen::Index>();
      const auto cols = spec.at("cols").get<Eigen::Index>();
      if (rows != c.frames) {
        throw IoError(IoCode::kShapeMismatch,
                      "channel '" + name + "' declares " +
                          std::to_string(rows) + " rows for " +
                          std::to_string(c.frames) + " frames");
      }
      if (spec.at("dtype").get<std::string>() != "float32le") {
        throw IoError(IoCode::kParse, "unsupported dtype in '" + name + "'");
      }
      const fs::path blob = dir / spec.at("file").get<std::string>();
      std::error_code ec;
      const auto size = fs::file_size(blob, ec);
      if (ec) throw IoError(IoCode::kNotFound, "missing blob " + blob.string());
      const auto expected = static_cast<uintmax_t>(rows * cols) * sizeof(float);
      if (size < expected) {
        throw IoError(IoCode::kTruncated,
                      blob.string() + " holds " + std::to_string(size) +
                          " bytes, expected " + std::to_string(expected));
      }
      if (size > expected) {
        throw IoError(IoCode::kShapeMismatch,
                      blob.string() + " holds " + std::to_string(size) +
                          " bytes, expected " + std::to_string(expected));
      }
      ChannelGroup group;
      group.unit = spec.at("unit").get<std::string>();
      group.data.resize(rows, cols);
      std::ifstream bin(blob, std::ios::binary);
      bin.read(reinterpret_cast<char*>(group.data.data()),
               static_cast<std::streamsize>(expected));
      if (!bin) throw IoError(IoCode::kTruncated, "short read on " + blob.string());
      c.channels.emplace(name, std::move(group));
    }
  } catch (const json::exception& e) {
    throw IoError(IoCode::kParse, manifest_path.string() + ": " + e.what());
  }
  return c;
}

void PutPose(const PoseSequence& pose, MotionContainer* container) {
  const int frames = pose.frames();
  ChannelGroup trans{"m", FloatMatrix(frames, 3)};
  ChannelGroup rot{"quat_wxyz", FloatMatrix(frames, 4 * kJointCount)};
  for (int f = 0; f < frames; ++f) {
    trans.data.row(f) = pose.root_translation(f).transpose().cast<float>();
    for (int j = 0; j < kJointCount; ++j) {
      const auto& q = pose.rotation(f, j).quat();
      rot.data.block<1, 4>(f, 4 * j) << static_cast<float>(q.w()),
          static_cast<float>(q.x()), static_cast<float>(q.y()),
          static_cast<float>(q.z());
    }
  }
  container->frames = frames;
  container->fps = pose.fps();
  container->channels["pose.root_translation"] = std::move(trans);
  container->channels["pose.rotations"] = std::move(rot);
}

PoseSequence GetPose(const MotionContainer& container) {
  const auto& trans = container.channel("pose.root_translation").data;
  const auto& rot = container.channel("pose.rotations").data;
  if (trans.cols() != 3 || rot.cols() != 4 * kJointCount) {
    throw IoError(IoCode::kShapeMismatch, "pose channels have wrong widths");
  }
  PoseSequence pose(container.frames, container.fps);
  for (int f = 0; f < container.frames; ++f) {
    pose.root_translation(f) = trans.row(f).transpose().cast<double>();
    for (int j = 0; j < kJointCount; ++j) {
      pose.rotation(f, j) = Rotation(rot(f, 4 * j), rot(f, 4 * j + 1),
                                     rot(f, 4 * j + 2), rot(f, 4 * j + 3));
    }
  }
  return pose;
}

void PutTrack(const SensorTrack& track, const std::string& prefix,
              MotionContainer* container) {
  const int frames = track.frames();
  const int k = track.sensors();
  ChannelGroup acc{"m/s^2", FloatMatrix(frames, 3 * k)};
  ChannelGroup ori{"quat_wxyz", FloatMatrix(frames, 4 * k)};
  for (int f = 0; f < frames; ++f) {
    for (int s = 0; s < k; ++s) {
      acc.data.block<1, 3>(f, 3 * s) = track.acc(f, s).transpose().cast<float>();
      const auto& q = track.ori(f, s).quat();
      ori.data.block<1, 4>(f, 4 * s) << static_cast<float>(q.w()),
          static_cast<float>(q.x()), static_cast<float>(q.y()),
          static_cast<float>(q.z());
    }
  }
  container->frames = frames;
  container->fps = track.fps();
  container->channels[prefix + ".acc"] = std::move(acc);
  container->channels[prefix + ".ori"] = std::move(ori);
  container->extra["tracks"][prefix] = {
      {"sensor_ids", track.sensor_ids()},
      {"tag", ToString(track.tag())},
      {"gravity_included", track.gravity_included()}};
}

bool HasTrack(const MotionContainer& container, const std::string& prefix) {
  return container.channels.count(prefix + ".acc") &&
         container.channels.count(prefix + ".ori") &&
         container.extra.contains("tracks") &&
         container.extra["tracks"].contains(prefix);
}

SensorTrack GetTrack(const MotionContainer& container,
                     const std::string& prefix) {
  if (!HasTrack(container, prefix)) {
    throw IoError(IoCode::kNotFound, "container has no track '" + prefix + "'");
  }
  const json& meta = container.extra["tracks"][prefix];
  const auto ids = meta.at("sensor_ids").get<std::vector<std::string>>();
  const int k = static_cast<int>(ids.size());
  const auto& acc = container.channel(prefix + ".acc").data;
  const auto& ori = container.channel(prefix + ".ori").data;
  if (acc.cols() != 3 * k || ori.cols() != 4 * k) {
    throw IoError(IoCode::kShapeMismatch,
                  "track '" + prefix + "' widths disagree with its sensor ids");
  }
  SensorTrack track(container.frames, ids, container.fps,
                    TightnessFromString(meta.at("tag").get<std::string>()));
  track.set_gravity_included(meta.value("gravity_included", false));
  for (int f = 0; f < container.frames; ++f) {
    for (int s = 0; s < k; ++s) {
      track.acc(f, s) = acc.block<1, 3>(f, 3 * s).transpose().cast<double>();
      track.ori(f, s) = Rotation(ori(f, 4 * s), ori(f, 4 * s + 1),
                                 ori(f, 4 * s + 2), ori(f, 4 * s + 3));
    }
  }
  return track;
}

std::string ContainerDigest(const MotionContainer& container) {
  std::string bytes = ManifestJson(container).dump();
  for (const auto& [name, group] : container.channels) {
    bytes += name;
    bytes += BlobBytes(group.data);
  }
  return Sha256Hex(bytes);
}

}  // namespace looseimu
