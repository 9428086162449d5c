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

#include "looseimu/synthdata.h"

#include <fstream>
#include <random>

#include "looseimu/container.h"
#include "looseimu/errors.h"
#include "looseimu/features.h"

namespace looseimu {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

uint64_t DeriveSeed(uint64_t seed, uint64_t a, uint64_t b = 0) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(a), static_cast<uint32_t>(b)};
  std::mt19937_64 rng(seq);
  return rng();
}

Rotation DecodeOrFallback(const double* six, const Rotation& fallback) {
  try {
    return Rotation::FromSixD({six, kSixD});
  } catch (const ValidationError&) {
    return fallback;
  }
}

}  // namespace

WindowSampler SecondarySampler(const DiffusionModel& model,
                               std::span<const int> steps, int sensors) {
  const FeatureLayout& layout = model.layout();
  if (layout.kind != ModelKind::kSecondary ||
      layout.observation_width != sensors * kSensorChannels + 4 * kJointCount ||
      layout.target_width != sensors * kSensorChannels) {
    throw IoError(IoCode::kIncompatible,
                  "checkpoint is not a secondary generator for " +
                      std::to_string(sensors) + " sensors");
  }
  std::vector<int> owned(steps.begin(), steps.end());
  return [&model, owned](const Matrix& observation, uint64_t seed) {
    return model.Sample(observation, owned, seed);
  };
}

SensorTrack GenerateLoose(const WindowSampler& sampler, int window_frames,
                          const SensorTrack& tight, const PoseSequence& pose,
                          uint64_t seed) {
  if (tight.frames() != pose.frames()) {
    throw ShapeError("tight track and pose differ in frame count");
  }
  if (window_frames < 2) throw ConfigError("window must hold >= 2 frames");
  const int frames = tight.frames();
  const int k = tight.sensors();
  SensorTrack out(frames, tight.sensor_ids(), tight.fps(),
                  Tightness::kLooseGenerated);
  out.set_gravity_included(tight.gravity_included());
  if (frames == 0) return out;

  Matrix obs(frames, k * kSensorChannels + 4 * kJointCount);
  obs.leftCols(k * kSensorChannels) = SensorFeatures(tight);
  obs.rightCols(4 * kJointCount) = QuaternionFeatures(pose);
  const int n = window_frames;
  const int padded = std::max(frames, n);
  if (padded > frames) {
    Matrix grown(padded, obs.cols());
    grown.topRows(frames) = obs;
    for (int f = frames; f < padded; ++f) grown.row(f) = obs.row(frames - 1);
    obs = std::move(grown);
  }

  std::vector<int> starts;
  const int hop = std::max(1, n / 2);
  for (int s = 0; s + n <= padded; s += hop) starts.push_back(s);
  if (starts.back() + n < padded) starts.push_back(padded - n);

  int filled = 0;  // frames [0, filled) hold stitched output
  for (size_t w = 0; w < starts.size(); ++w) {
    const int s = starts[w];
    const Matrix loose = sampler(obs.middleRows(s, n), DeriveSeed(seed, w));
    if (loose.rows() != n || loose.cols() != k * kSensorChannels) {
      throw ShapeError("window sampler returned the wrong shape");
    }
    const int overlap = filled - s;
    for (int i = 0; i < n && s + i < frames; ++i) {
      const int f = s + i;
      for (int j = 0; j < k; ++j) {
        const double* p = loose.row(i).data() + j * kSensorChannels;
        const Vec3 acc(p[6], p[7], p[8]);
        if (i < overlap) {
          // Weight of the new window ramps linearly across the overlap.
          const double a = (i + 1.0) / (overlap + 1.0);
          const Rotation ori = DecodeOrFallback(p, out.ori(f, j));
          out.acc(f, j) = (1.0 - a) * out.acc(f, j) + a * acc;
          out.ori(f, j) = Slerp(out.ori(f, j), ori, a);
        } else {
          out.acc(f, j) = acc;
          out.ori(f, j) = DecodeOrFallback(p, tight.ori(f, j));
        }
      }
    }
    filled = std::min(frames, s + n);
  }
  return out;
}

SensorTrack GenerateLoose(const DiffusionModel& secondary,
                          const SensorTrack& tight, const PoseSequence& pose,
                          std::span<const int> steps, uint64_t seed) {
  return GenerateLoose(SecondarySampler(secondary, steps, tight.sensors()),
                       secondary.window(), tight, pose, seed);
}

void BlendSpec::Validate() const {
  if (source == Source::kFixed && !(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("fixed blend alpha must lie in [0, 1]");
  }
  if (window_frames < 1) throw ConfigError("blend window must be >= 1 frame");
}

BlendResult Blend(const SensorTrack& simulated, const SensorTrack& generated,
                  const BlendSpec& spec) {
  spec.Validate();
  simulated.CheckSameShape(generated);
  const int frames = simulated.frames();
  BlendResult out{SensorTrack(frames, simulated.sensor_ids(), simulated.fps(),
                              Tightness::kLooseBlended),
                  {}};
  out.track.set_gravity_included(simulated.gravity_included());
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sequence_alpha = unit(rng);
  for (int start = 0; start < frames; start += spec.window_frames) {
    double alpha = spec.alpha;
    if (spec.source == BlendSpec::Source::kUniformPerWindow) alpha = unit(rng);
    if (spec.source == BlendSpec::Source::kUniformPerSequence) alpha = sequence_alpha;
    out.alphas.push_back(alpha);
    const int end = std::min(frames, start + spec.window_frames);
    for (int f = start; f < end; ++f) {
      for (int s = 0; s < simulated.sensors(); ++s) {
        out.track.acc(f, s) =
            alpha * simulated.acc(f, s) + (1.0 - alpha) * generated.acc(f, s);
        out.track.ori(f, s) = Slerp(generated.ori(f, s), simulated.ori(f, s), alpha);
      }
    }
  }
  return out;
}

int CountWindows(int frames, int window, int stride) {
  if (window < 1 || stride < 1) throw ConfigError("window and stride must be >= 1");
  if (frames < window) return 0;
  return (frames - window) / stride + 1;
}

json CorpusManifest::ToJson() const {
  json entries_json = json::array();
  for (const auto& e : entries) {
    entries_json.push_back({{"dir", e.dir},
                            {"motion", e.motion},
                            {"garment_index", e.garment_index},
                            {"garment",
                             {{"gamma", e.garment.gamma},
                              {"height_cm", e.garment.height_cm},
                              {"bmi", e.garment.bmi}}},
                            {"frames", e.frames},
                            {"frame_range", {0, e.frames}},
                            {"windows", e.windows},
                            {"provenance", e.provenance},
                            {"digest", e.digest}});
  }
  return {{"schema_version", schema_version},
          {"window", window},
          {"stride", stride},
          {"total_windows", total_windows},
          {"config_hash", config_hash},
          {"seed", seed},
          {"entries", entries_json}};
}

CorpusManifest CorpusManifest::FromJson(const json& j) {
  CorpusManifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1) {
      throw IoError(IoCode::kVersionMismatch, "unsupported corpus schema");
    }
    m.window = j.at("window").get<int>();
    m.stride = j.at("stride").get<int>();
    m.total_windows = j.at("total_windows").get<int>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    for (const auto& e : j.at("entries")) {
      CorpusEntry entry;
      entry.dir = e.at("dir").get<std::string>();
      entry.motion = e.at("motion").get<int>();
      entry.garment_index = e.at("garment_index").get<int>();
      entry.garment.gamma = e.at("garment").at("gamma").get<double>();
      entry.garment.height_cm = e.at("garment").at("height_cm").get<double>();
      entry.garment.bmi = e.at("garment").at("bmi").get<double>();
      entry.frames = e.at("frames").get<int>();
      entry.windows = e.at("windows").get<int>();
      entry.provenance = e.at("provenance").get<std::vector<std::string>>();
      entry.digest = e.at("digest").get<std::string>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw IoError(IoCode::kParse, std::string("corpus manifest: ") + e.what());
  }
  return m;
}

CorpusManifest BuildCorpus(const CorpusSpec& spec, const fs::path& out_dir) {
  ValidatePlacements(spec.placements);
  if (spec.blend && !spec.secondary) {
    throw ConfigError("blending needs a secondary generator");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(IoCode::kWrite, "cannot create " + out_dir.string());

  CorpusManifest manifest;
  manifest.window = spec.window;
  manifest.stride = spec.stride;
  manifest.config_hash = spec.config_hash;
  manifest.seed = spec.seed;
  for (size_t m = 0; m < spec.motions.size(); ++m) {
    const PoseSequence& pose = spec.motions[m];
    const SensorTrack tight = SimulateTight(pose, spec.placements, spec.simulation);
    for (size_t g = 0; g < spec.garments.size(); ++g) {
      const GarmentProxy& garment = spec.garments[g];
      const uint64_t sim_seed = DeriveSeed(spec.seed, m, g);
      LooseSimulation loose =
          SimulateLoose(pose, spec.placements, garment, sim_seed, spec.simulation);

      MotionContainer c;
      PutPose(pose, &c);
      PutTrack(tight, "tight", &c);
      PutTrack(loose.track, "loose_sim", &c);
      c.garment = garment;
      c.gravity_included = spec.simulation.add_gravity;
      c.seed_lineage = {spec.seed, sim_seed};
      c.config_hash = spec.config_hash;
      c.provenance = {"procedural_motion", "simulated_tight", "simulated_loose"};
      c.extra["degenerate_frames"] = loose.degenerate_frames;
      if (spec.secondary) {
        const uint64_t gen_seed = DeriveSeed(spec.seed, m, g + 1000003);
        const SensorTrack generated = GenerateLoose(
            *spec.secondary, spec.secondary_window, tight, pose, gen_seed);
        PutTrack(generated, "loose_generated", &c);
        c.seed_lineage.push_back(gen_seed);
        c.provenance.push_back("generated_loose");
        if (spec.blend) {
          BlendSpec blend = *spec.blend;
          blend.seed = DeriveSeed(blend.seed, m, g);
          const BlendResult blended = Blend(loose.track, generated, blend);
          PutTrack(blended.track, "loose_blended", &c);
          c.extra["blend_alphas"] = blended.alphas;
          c.extra["blend_window"] = blend.window_frames;
          c.seed_lineage.push_back(blend.seed);
          c.provenance.push_back("blended_loose");
        }
      }
      CorpusEntry entry;
      entry.dir = "m" + std::to_string(m) + "_g" + std::to_string(g);
      entry.motion = static_cast<int>(m);
      entry.garment_index = static_cast<int>(g);
      entry.garment = garment;
      entry.frames = pose.frames();
      entry.windows = CountWindows(pose.frames(), spec.window, spec.stride);
      entry.provenance = c.provenance;
      entry.digest = ContainerDigest(c);
      SaveContainer(c, out_dir / entry.dir);
      manifest.total_windows += entry.windows;
      manifest.entries.push_back(std::move(entry));
    }
  }
  AtomicWriteText(out_dir / "corpus.json", manifest.ToJson().dump(2) + "\n");
  return manifest;
}

CorpusManifest LoadCorpusManifest(const fs::path& out_dir) {
  std::ifstream in(out_dir / "corpus.json");
  if (!in) throw IoError(IoCode::kNotFound, "missing corpus.json in " + out_dir.string());
  try {
    return CorpusManifest::FromJson(json::parse(in));
  } catch (const json::parse_error& e) {
    throw IoError(IoCode::kParse, std::string("corpus.json: ") + e.what());
  }
}

}  // namespace looseimu
