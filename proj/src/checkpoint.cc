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

#include "looseimu/checkpoint.h"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "looseimu/errors.h"

namespace looseimu {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TensorRef {
  std::string name;
  const Matrix* value;
};

json ConfigJson(const DenoiserConfig& c) {
  return {{"encoder_blocks", c.encoder_blocks},
          {"decoder_blocks", c.decoder_blocks},
          {"model_width", c.model_width},
          {"attention_heads", c.attention_heads},
          {"window_frames", c.window_frames},
          {"input_part_widths", c.input_part_widths},
          {"condition_width", c.condition_width},
          {"output_width", c.output_width},
          {"dropout", c.dropout},
          {"conv_kernel", c.conv_kernel},
          {"ff_multiplier", c.ff_multiplier}};
}

DenoiserConfig ConfigFromJson(const json& j) {
  DenoiserConfig c;
  c.encoder_blocks = j.at("encoder_blocks").get<int>();
  c.decoder_blocks = j.at("decoder_blocks").get<int>();
  c.model_width = j.at("model_width").get<int>();
  c.attention_heads = j.at("attention_heads").get<int>();
  c.window_frames = j.at("window_frames").get<int>();
  c.input_part_widths = j.at("input_part_widths").get<std::array<int, 4>>();
  c.condition_width = j.at("condition_width").get<int>();
  c.output_width = j.at("output_width").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.conv_kernel = j.at("conv_kernel").get<int>();
  c.ff_multiplier = j.at("ff_multiplier").get<int>();
  return c;
}

Matrix RowMatrix(const RowVector& v) { return Matrix(v); }

}  // namespace

void SaveCheckpoint(const fs::path& path, const DiffusionModel& model,
                    const CheckpointMeta& meta, const AdamState* adam) {
  const auto& params = model.denoiser().parameters();
  const Matrix norm[4] = {RowMatrix(model.target_norm().mean),
                          RowMatrix(model.target_norm().std),
                          RowMatrix(model.observation_norm().mean),
                          RowMatrix(model.observation_norm().std)};
  std::vector<TensorRef> tensors;
  for (const auto& p : params) tensors.push_back({p.name, &p.value});
  tensors.push_back({"norm.target.mean", &norm[0]});
  tensors.push_back({"norm.target.std", &norm[1]});
  tensors.push_back({"norm.observation.mean", &norm[2]});
  tensors.push_back({"norm.observation.std", &norm[3]});
  if (adam) {
    if (adam->m.size() != params.size() || adam->v.size() != params.size()) {
      throw ShapeError("optimizer state does not match the parameters");
    }
    for (size_t i = 0; i < params.size(); ++i)
      tensors.push_back({"adam.m." + params[i].name, &adam->m[i]});
    for (size_t i = 0; i < params.size(); ++i)
      tensors.push_back({"adam.v." + params[i].name, &adam->v[i]});
  }

  json header;
  header["kind"] = ToString(model.layout().kind);
  header["body"] = ToString(model.layout().body);
  header["denoiser"] = ConfigJson(model.denoiser().config());
  header["schedule"] = {{"T", model.schedule().T()},
                        {"kind", ToString(model.schedule().kind())}};
  header["config_hash"] = meta.config_hash;
  header["seed"] = meta.seed;
  header["extra"] = meta.extra;
  header["adam_step"] = adam ? json(adam->step) : json(nullptr);
  json list = json::array();
  uint64_t offset = 0;
  for (const auto& t : tensors) {
    list.push_back({{"name", t.name},
                    {"rows", t.value->rows()},
                    {"cols", t.value->cols()},
                    {"offset", offset}});
    offset += static_cast<uint64_t>(t.value->size()) * sizeof(float);
  }
  header["tensors"] = list;
  const std::string text = header.dump();

  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoCode::kWrite, "cannot write " + tmp.string());
    const uint32_t version = kCheckpointVersion;
    const uint64_t header_len = text.size();
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    out.write(reinterpret_cast<const char*>(&version), sizeof(version));
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::vector<float> buf;
    for (const auto& t : tensors) {
      buf.resize(t.value->size());
      for (Eigen::Index i = 0; i < t.value->size(); ++i)
        buf[i] = static_cast<float>(t.value->data()[i]);
      out.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!out) throw IoError(IoCode::kWrite, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoCode::kNotFound, "cannot open " + path.string());
  char magic[8];
  uint32_t version = 0;
  uint64_t header_len = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in) throw IoError(IoCode::kTruncated, path.string() + ": short preamble");
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw IoError(IoCode::kParse, path.string() + " is not a checkpoint");
  }
  if (version != kCheckpointVersion) {
    throw IoError(IoCode::kVersionMismatch,
                  "checkpoint version " + std::to_string(version) +
                      ", this build reads " + std::to_string(kCheckpointVersion));
  }
  std::string text(header_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError(IoCode::kTruncated, path.string() + ": short header");
  const std::streamoff data_start = in.tellg();

  Checkpoint ck;
  try {
    const json header = json::parse(text);
    const FeatureLayout layout = FeatureLayout::Make(
        ModelKindFromString(header.at("kind").get<std::string>()),
        BodySetFromString(header.at("body").get<std::string>()));
    const DenoiserConfig config = ConfigFromJson(header.at("denoiser"));
    NoiseSchedule schedule = NoiseSchedule::Make(
        header.at("schedule").at("T").get<int>(),
        ScheduleKindFromString(header.at("schedule").at("kind").get<std::string>()));

    std::map<std::string, Matrix> tensors;
    std::vector<float> buf;
    for (const auto& t : header.at("tensors")) {
      const auto rows = t.at("rows").get<Eigen::Index>();
      const auto cols = t.at("cols").get<Eigen::Index>();
      buf.resize(static_cast<size_t>(rows * cols));
      in.seekg(data_start + t.at("offset").get<std::streamoff>());
      in.read(reinterpret_cast<char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
      if (!in) {
        throw IoError(IoCode::kTruncated,
                      path.string() + ": tensor " +
                          t.at("name").get<std::string>() + " is cut short");
      }
      Matrix m(rows, cols);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = buf[i];
      tensors.emplace(t.at("name").get<std::string>(), std::move(m));
    }
    auto take = [&](const std::string& name) -> Matrix& {
      auto it = tensors.find(name);
      if (it == tensors.end()) {
        throw IoError(IoCode::kIncompatible, "checkpoint lacks tensor " + name);
      }
      return it->second;
    };
    Normalizer target{take("norm.target.mean").row(0),
                      take("norm.target.std").row(0)};
    Normalizer observation{take("norm.observation.mean").row(0),
                           take("norm.observation.std").row(0)};
    ck.model = DiffusionModel(layout, config, std::move(schedule),
                              std::move(target), std::move(observation), 0);
    auto& params = ck.model.denoiser().parameters();
    for (auto& p : params) {
      const Matrix& value = take(p.name);
      if (value.rows() != p.value.rows() || value.cols() != p.value.cols()) {
        throw IoError(IoCode::kShapeMismatch, "tensor " + p.name + " has wrong shape");
      }
      p.value = value;
    }
    if (!header.at("adam_step").is_null()) {
      AdamState adam;
      adam.step = header.at("adam_step").get<int64_t>();
      for (const auto& p : params) adam.m.push_back(take("adam.m." + p.name));
      for (const auto& p : params) adam.v.push_back(take("adam.v." + p.name));
      ck.adam = std::move(adam);
    }
    ck.meta.config_hash = header.at("config_hash").get<std::string>();
    ck.meta.seed = header.at("seed").get<uint64_t>();
    ck.meta.extra = header.value("extra", json::object());
  } catch (const json::exception& e) {
    throw IoError(IoCode::kParse, path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(IoCode::kIncompatible, path.string() + ": " + e.what());
  }
  return ck;
}

}  // namespace looseimu
