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

// looseimu: command-line front end for the whole pipeline. Run
// `looseimu --help` for the subcommands.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "looseimu/checkpoint.h"
#include "looseimu/config.h"
#include "looseimu/container.h"
#include "looseimu/errors.h"
#include "looseimu/features.h"
#include "looseimu/imusim.h"
#include "looseimu/inference.h"
#include "looseimu/metrics.h"
#include "looseimu/model.h"
#include "looseimu/motion_gen.h"
#include "looseimu/synthdata.h"
#include "looseimu/trainer.h"
#include "svg_plot.h"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace looseimu::tools {
namespace {

constexpr int kUsageExit = 2;

struct Globals {
  uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string config_path;
  std::string profile;
};

// Loads the YAML config (defaults if none), applies the global flags and
// any subcommand overrides, then validates.
RunConfig ResolveConfig(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : RunConfig::Load(g.config_path);
  if (g.seed_opt != nullptr && g.seed_opt->count() > 0) c.seed = g.seed;
  if (!g.profile.empty()) c.profile = ProfileFromString(g.profile);
  return c;
}

void Finalize(RunConfig& c) {
  c.train.seed = c.seed;
  c.Validate();
}

// splitmix64 over (seed, stream); keeps sub-seeds of different stages
// independent of each other.
uint64_t SubSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string StampLine(const RunConfig& c) {
  return "config_hash=" + c.Hash() + " seed=" + std::to_string(c.seed);
}

std::vector<SensorPlacement> PlacementsFor(BodySet body) {
  return body == BodySet::kUpper ? UpperSensorSet() : SixSensorSet();
}

std::vector<std::string> SensorIds(const std::vector<SensorPlacement>& p) {
  std::vector<std::string> ids;
  for (const auto& s : p) ids.push_back(s.sensor_id);
  return ids;
}

// The body set whose sensor ids match the corpus's tight track.
BodySet CorpusBody(const MotionContainer& c) {
  const auto ids = GetTrack(c, "tight").sensor_ids();
  for (BodySet b : {BodySet::kUpper, BodySet::kWhole}) {
    if (ids == SensorIds(PlacementsFor(b))) return b;
  }
  throw IoError(IoCode::kIncompatible, "corpus sensors match no known sensor set");
}

BodySet ResolveBody(const std::string& flag, const MotionContainer& first) {
  const BodySet corpus = CorpusBody(first);
  if (flag != "auto" && BodySetFromString(flag) != corpus) {
    throw ConfigError("--body " + flag + " but the corpus was simulated for " +
                      ToString(corpus));
  }
  return corpus;
}

std::vector<int> SamplerSteps(const RunConfig& c, const DiffusionModel& model) {
  return StridedSteps(model.schedule().T(), c.sampler_steps);
}

StreamOptions MakeStreamOptions(const RunConfig& c, const DiffusionModel& model) {
  StreamOptions o;
  o.steps = SamplerSteps(c, model);
  o.clamp_history = c.clamp_history;
  o.history_blend = c.history_blend;
  o.seed = SubSeed(c.seed, 7);
  return o;
}

// Raw observation rows a pose model consumes for a recording.
Matrix PoseObservation(const FeatureLayout& layout, const SensorTrack& loose,
                       const std::optional<GarmentProxy>& garment) {
  if (SensorIds(layout.sensors) != loose.sensor_ids()) {
    throw IoError(IoCode::kIncompatible, "track sensors do not match the model");
  }
  Matrix obs(loose.frames(), layout.observation_width);
  const Matrix f = SensorFeatures(loose);
  obs.leftCols(f.cols()) = f;
  if (layout.kind == ModelKind::kGarmentAware) {
    if (!garment) throw ConfigError("garment-aware model needs garment parameters");
    obs.rightCols(kGarmentChannels) = GarmentFeatures(*garment, loose.frames());
  }
  return obs;
}

Checkpoint LoadPoseModel(const std::string& path) {
  Checkpoint ck = LoadCheckpoint(path);
  if (ck.model.layout().kind == ModelKind::kSecondary) {
    throw IoError(IoCode::kIncompatible, path + " holds a secondary generator, not a pose model");
  }
  return ck;
}

void PrintJson(const json& j) { std::cout << j.dump(2) << "\n"; }

// --- motion -------------------------------------------------------------

struct MotionArgs {
  std::string out;
  int frames = 0;
};

void RunMotion(const Globals& g, const MotionArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  const int frames =
      a.frames > 0 ? a.frames : static_cast<int>(c.motion_minutes * 60 * c.fps);
  MotionGenOptions opts;
  opts.fps = c.fps;
  const GeneratedMotion motion = GenerateMotion(frames, c.seed, opts);
  MotionContainer out;
  PutPose(motion.pose, &out);
  ChannelGroup activity{"index", FloatMatrix(frames, 1)};
  for (int f = 0; f < frames; ++f)
    activity.data(f, 0) = static_cast<float>(motion.activity[f]);
  out.channels["motion.activity"] = std::move(activity);
  json names = json::array();
  for (int i = 0; i < kActivityCount; ++i) names.push_back(ToString(static_cast<Activity>(i)));
  out.extra["activities"] = names;
  out.provenance = {"procedural_motion"};
  out.seed_lineage = {c.seed};
  out.config_hash = c.Hash();
  SaveContainer(out, a.out);
  PrintJson({{"out", a.out}, {"frames", frames}, {"config_hash", c.Hash()}, {"seed", c.seed}});
}

// --- simulate -----------------------------------------------------------

struct SimulateArgs {
  std::string out;
  int clips = 1;
  int frames = 0;
  std::string body = "whole";
  std::string garments = "config";
  std::vector<std::string> motions;
};

void RunSimulate(const Globals& g, const SimulateArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  CorpusSpec spec;
  spec.placements = PlacementsFor(BodySetFromString(a.body));
  if (a.garments == "grid") {
    spec.garments = DefaultGarmentGrid();
  } else if (a.garments == "config") {
    spec.garments = {c.garment};
  } else {
    throw ConfigError("--garments must be config or grid, got " + a.garments);
  }
  if (!a.motions.empty()) {
    for (const auto& dir : a.motions) spec.motions.push_back(GetPose(LoadContainer(dir)));
  } else {
    const int frames =
        a.frames > 0 ? a.frames : static_cast<int>(c.motion_minutes * 60 * c.fps);
    MotionGenOptions opts;
    opts.fps = c.fps;
    for (int m = 0; m < a.clips; ++m)
      spec.motions.push_back(GenerateMotion(frames, SubSeed(c.seed, 100 + m), opts).pose);
  }
  spec.simulation = c.simulation;
  spec.window = c.window;
  spec.stride = c.stride;
  spec.seed = c.seed;
  spec.config_hash = c.Hash();
  const CorpusManifest manifest = BuildCorpus(spec, a.out);
  PrintJson({{"out", a.out},
             {"recordings", manifest.entries.size()},
             {"total_windows", manifest.total_windows},
             {"body", a.body},
             {"config_hash", manifest.config_hash},
             {"seed", manifest.seed}});
}

// --- train-secondary / train-pose ---------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string out;
  std::string variant = "unaware";
  std::string body = "auto";
  std::string track = "loose_sim";
  std::string resume;
  std::string loss_csv;
  int steps = -1;
  int batch = -1;
  double lr = -1.0;
};

void RunTrain(const Globals& g, const TrainArgs& a, bool secondary) {
  RunConfig c = ResolveConfig(g);
  if (a.steps >= 0) c.train.steps = a.steps;
  if (a.batch > 0) c.train.batch = a.batch;
  if (a.lr >= 0) c.train.optimizer.learning_rate = a.lr;
  Finalize(c);

  const CorpusManifest manifest = LoadCorpusManifest(a.corpus);
  if (manifest.entries.empty()) throw ConfigError(a.corpus + " has no recordings");
  const fs::path root(a.corpus);
  std::vector<MotionContainer> recordings;
  for (const auto& e : manifest.entries) recordings.push_back(LoadContainer(root / e.dir));

  const ModelKind kind = secondary ? ModelKind::kSecondary : ModelKindFromString(a.variant);
  if (!secondary && kind == ModelKind::kSecondary) {
    throw ConfigError("train-pose cannot train the secondary generator");
  }
  const BodySet body = ResolveBody(a.body, recordings.front());
  const FeatureLayout layout = FeatureLayout::Make(kind, body);

  WindowDataset data(c.window, c.stride);
  for (const auto& rec : recordings) {
    if (!HasTrack(rec, a.track)) {
      throw IoError(IoCode::kIncompatible, "corpus recording lacks track " + a.track);
    }
    data.Add(BuildFeatures(layout, GetPose(rec), GetTrack(rec, "tight"),
                           GetTrack(rec, a.track), rec.garment.value_or(GarmentProxy{})));
  }
  if (data.size() == 0) {
    throw ConfigError("corpus has no windows of " + std::to_string(c.window) + " frames");
  }

  DiffusionModel model;
  std::optional<AdamState> adam;
  if (!a.resume.empty()) {
    Checkpoint ck = LoadCheckpoint(a.resume);
    if (ck.model.layout().kind != kind || ck.model.layout().body != body) {
      throw IoError(IoCode::kIncompatible, a.resume + " was trained for a different model");
    }
    model = std::move(ck.model);
    adam = std::move(ck.adam);
  } else {
    model = DiffusionModel(layout, DenoiserConfigFor(layout, c.profile, c.window),
                           NoiseSchedule::Make(c.diffusion_steps, c.schedule),
                           data.FitTargetNormalizer(), data.FitObservationNormalizer(),
                           SubSeed(c.seed, 1));
  }

  TrainConfig tc = c.train;
  if (tc.divergence_dump.empty()) tc.divergence_dump = a.out + ".diverged";
  const TrainResult result =
      Train(model, data, tc, adam ? &*adam : nullptr, [](const LossRecord& r) {
        std::cerr << "step " << r.step << " loss " << r.total << "\n";
      });

  CheckpointMeta meta;
  meta.config_hash = c.Hash();
  meta.seed = c.seed;
  meta.extra = {{"corpus", a.corpus},
                {"track", a.track},
                {"kind", ToString(kind)},
                {"body", ToString(body)},
                {"optimizer_steps", result.optimizer.step},
                {"train_seconds", result.seconds},
                {"config", c.ToYaml()}};
  SaveCheckpoint(a.out, model, meta, &result.optimizer);
  const std::string csv = a.loss_csv.empty() ? a.out + ".loss.csv" : a.loss_csv;
  WriteLossCurveCsv(result.curve, csv, StampLine(c));
  PrintJson({{"checkpoint", a.out},
             {"loss_csv", csv},
             {"kind", ToString(kind)},
             {"body", ToString(body)},
             {"windows", data.size()},
             {"optimizer_steps", result.optimizer.step},
             {"final_loss", result.curve.empty() ? 0.0 : result.curve.back().total},
             {"seconds", result.seconds},
             {"config_hash", meta.config_hash},
             {"seed", c.seed}});
}

// --- synth --------------------------------------------------------------

struct SynthArgs {
  std::string corpus;
  std::string secondary;
  std::string alpha_source = "window";
  double alpha = 0.5;
};

void RunSynth(const Globals& g, const SynthArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  const Checkpoint ck = LoadCheckpoint(a.secondary);
  const std::vector<int> steps = SamplerSteps(c, ck.model);
  const int sensors = static_cast<int>(ck.model.layout().sensors.size());
  const WindowSampler sampler = SecondarySampler(ck.model, steps, sensors);

  BlendSpec blend;
  if (a.alpha_source == "fixed") {
    blend.source = BlendSpec::Source::kFixed;
  } else if (a.alpha_source == "window") {
    blend.source = BlendSpec::Source::kUniformPerWindow;
  } else if (a.alpha_source == "sequence") {
    blend.source = BlendSpec::Source::kUniformPerSequence;
  } else {
    throw ConfigError("--alpha-source must be fixed, window or sequence");
  }
  blend.alpha = a.alpha;
  blend.window_frames = c.window;
  blend.Validate();

  const fs::path root(a.corpus);
  CorpusManifest manifest = LoadCorpusManifest(root);
  for (size_t i = 0; i < manifest.entries.size(); ++i) {
    CorpusEntry& e = manifest.entries[i];
    MotionContainer rec = LoadContainer(root / e.dir);
    const SensorTrack tight = GetTrack(rec, "tight");
    if (tight.sensor_ids() != SensorIds(ck.model.layout().sensors)) {
      throw IoError(IoCode::kIncompatible, "secondary model was trained on other sensors");
    }
    const uint64_t gen_seed = SubSeed(c.seed, 1000 + 2 * i);
    const SensorTrack generated =
        GenerateLoose(sampler, ck.model.window(), tight, GetPose(rec), gen_seed);
    BlendSpec spec = blend;
    spec.seed = SubSeed(c.seed, 1001 + 2 * i);
    const BlendResult blended = Blend(GetTrack(rec, "loose_sim"), generated, spec);
    PutTrack(generated, "loose_generated", &rec);
    PutTrack(blended.track, "loose_blended", &rec);
    std::erase_if(rec.provenance, [](const std::string& p) {
      return p == "generated_loose" || p == "blended_loose";
    });
    rec.provenance.push_back("generated_loose");
    rec.provenance.push_back("blended_loose");
    rec.seed_lineage.push_back(gen_seed);
    rec.seed_lineage.push_back(spec.seed);
    rec.extra["blend_alphas"] = blended.alphas;
    rec.extra["blend_window"] = spec.window_frames;
    rec.extra["synth"] = {{"config_hash", c.Hash()},
                          {"seed", c.seed},
                          {"secondary", a.secondary},
                          {"secondary_config_hash", ck.meta.config_hash}};
    SaveContainer(rec, root / e.dir);
    e.provenance = rec.provenance;
    e.digest = ContainerDigest(rec);
  }
  manifest.config_hash = c.Hash();
  manifest.seed = c.seed;
  AtomicWriteText(root / "corpus.json", manifest.ToJson().dump(2) + "\n");
  PrintJson({{"corpus", a.corpus},
             {"recordings", manifest.entries.size()},
             {"config_hash", c.Hash()},
             {"seed", c.seed}});
}

// --- infer --------------------------------------------------------------

struct InferArgs {
  std::string model;
  std::string mode = "batch";
  std::string method = "stream";
  std::string in;
  std::string out;
  std::string track = "loose_sim";
};

Matrix Predict(const DiffusionModel& model, const Matrix& obs, const StreamOptions& o,
               const std::string& method) {
  if (method == "stream") return PredictStreaming(model, obs, o);
  if (method == "chunked") return PredictChunked(model, obs, o.steps, o.seed);
  throw ConfigError("--method must be stream or chunked, got " + method);
}

void InferBatch(const RunConfig& c, const Checkpoint& ck, const InferArgs& a) {
  if (a.in.empty() || a.out.empty()) throw ConfigError("batch mode needs --in and --out");
  const DiffusionModel& model = ck.model;
  const FeatureLayout& layout = model.layout();
  MotionContainer in = LoadContainer(a.in);
  MotionContainer out;
  out.fps = in.fps;
  out.garment = in.garment;
  out.config_hash = c.Hash();
  out.seed_lineage = {c.seed};
  out.extra["model"] = a.model;
  out.extra["model_config_hash"] = ck.meta.config_hash;
  out.extra["input"] = a.in;
  if (layout.kind == ModelKind::kSecondary) {
    const PoseSequence pose = GetPose(in);
    const SensorTrack generated = GenerateLoose(
        model, GetTrack(in, "tight"), pose, SamplerSteps(c, model), SubSeed(c.seed, 8));
    PutPose(pose, &out);
    PutTrack(generated, "loose_generated", &out);
    out.provenance = {"generated_loose"};
  } else {
    const Matrix obs = PoseObservation(layout, GetTrack(in, a.track), in.garment);
    const Matrix pred = Predict(model, obs, MakeStreamOptions(c, model), a.method);
    PutPose(DecodePoseSequence(layout, pred, in.fps), &out);
    out.provenance = {"predicted_pose"};
    out.extra["method"] = a.method;
    out.extra["track"] = a.track;
  }
  out.frames = in.frames;
  SaveContainer(out, a.out);
  PrintJson({{"out", a.out}, {"frames", out.frames}, {"config_hash", c.Hash()}, {"seed", c.seed}});
}

// Text protocol on stdin/stdout, one frame per line. See docs/formats.md.
void InferStream(const RunConfig& c, const Checkpoint& ck) {
  const DiffusionModel& model = ck.model;
  const FeatureLayout& layout = model.layout();
  StreamState state(model, MakeStreamOptions(c, model));
  const bool pose_out = layout.pose.width > 0;
  std::cout << "# looseimu stream v1 " << StampLine(c) << " kind=" << ToString(layout.kind)
            << " body=" << ToString(layout.body) << " output="
            << (pose_out ? "local_quaternions_wxyz" : "target_row") << "\n";
  std::cout << std::flush;

  std::optional<int64_t> last;
  std::string line;
  int64_t line_no = 0;
  RowVector obs(layout.observation_width);
  while (std::getline(std::cin, line)) {
    ++line_no;
    const size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int64_t index = 0;
    if (!(ss >> index)) {
      throw IoError(IoCode::kParse, "line " + std::to_string(line_no) + ": bad frame index");
    }
    if (last && index != *last + 1) {
      throw ValidationError("line " + std::to_string(line_no) + ": frame " +
                            std::to_string(index) + " after " + std::to_string(*last));
    }
    last = index;
    int n = 0;
    for (double v; ss >> v; ++n) {
      if (n < obs.size()) obs[n] = v;
    }
    if (!ss.eof() || n != obs.size()) {
      throw IoError(IoCode::kParse, "line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(obs.size()) + " values");
    }
    const RowVector row = state.Step(obs);
    std::ostringstream o;
    o.precision(7);
    o << index;
    if (pose_out) {
      const RowVector pose = row.segment(layout.pose.begin, layout.pose.width);
      for (const Rotation& r : DecodePoseFrame(pose, layout.joints)) {
        const auto& q = r.quat();
        o << ' ' << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z();
      }
    } else {
      for (int i = 0; i < row.size(); ++i) o << ' ' << row[i];
    }
    std::cout << o.str() << "\n" << std::flush;
  }
}

void RunInfer(const Globals& g, const InferArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  const Checkpoint ck = LoadCheckpoint(a.model);
  if (a.mode == "batch") {
    InferBatch(c, ck, a);
  } else if (a.mode == "stream") {
    InferStream(c, ck);
  } else {
    throw ConfigError("--mode must be batch or stream, got " + a.mode);
  }
}

// --- eval ---------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string corpus;
  std::string out;
  std::string csv;
  std::string track = "loose_sim";
  std::string method = "stream";
  std::string policy = "zero";
  int missing = 0;
  int sweep = -1;
};

void RunEval(const Globals& g, const EvalArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  const Checkpoint ck = LoadPoseModel(a.model);
  const DiffusionModel& model = ck.model;
  const FeatureLayout& layout = model.layout();
  const int sensors = static_cast<int>(layout.sensors.size());
  const DropoutPolicy policy = DropoutPolicyFromString(a.policy);
  StreamOptions stream = MakeStreamOptions(c, model);

  const fs::path root(a.corpus);
  const CorpusManifest manifest = LoadCorpusManifest(root);
  std::vector<PoseSequence> truth;
  std::vector<Matrix> observations;
  for (const auto& e : manifest.entries) {
    const MotionContainer rec = LoadContainer(root / e.dir);
    truth.push_back(GetPose(rec));
    observations.push_back(PoseObservation(layout, GetTrack(rec, a.track), rec.garment));
  }
  if (truth.empty()) throw ConfigError(a.corpus + " has no recordings");

  std::vector<int> ks;
  if (a.sweep >= 0) {
    for (int k = 0; k <= a.sweep; ++k) ks.push_back(k);
  } else {
    ks.push_back(a.missing);
  }
  std::vector<EvalReport> reports;
  for (int k : ks) {
    std::vector<EvalReport> per_clip;
    for (size_t i = 0; i < truth.size(); ++i) {
      Matrix obs = observations[i];
      if (k > 0) {
        obs = ApplySensorDropout(obs, sensors, k, policy, SubSeed(c.seed, 5000 + i)).observation;
      }
      stream.seed = SubSeed(c.seed, 7 + i);
      const Matrix pred = Predict(model, obs, stream, a.method);
      per_clip.push_back(
          Evaluate(DecodePoseSequence(layout, pred, truth[i].fps()), truth[i], layout.body));
    }
    EvalReport r = AverageReports(per_clip);
    r.dropped_sensors = k;
    r.dropout_policy = ToString(policy);
    reports.push_back(std::move(r));
    std::cerr << "missing " << k << ": mpjre " << reports.back().mpjre_deg.mean
              << " deg, mpjpe " << reports.back().mpjpe_cm.mean << " cm\n";
  }

  json doc = {{"schema_version", 1},
              {"config_hash", c.Hash()},
              {"seed", c.seed},
              {"model", a.model},
              {"model_config_hash", ck.meta.config_hash},
              {"corpus", a.corpus},
              {"track", a.track},
              {"method", a.method},
              {"reports", json::array()}};
  for (const auto& r : reports) doc["reports"].push_back(r.ToJson());
  AtomicWriteText(a.out, doc.dump(2) + "\n");

  std::ostringstream csv;
  csv << "# " << StampLine(c) << "\n";
  if (a.sweep >= 0) {
    csv << "missing,mpjre_deg,mpjpe_cm,mpjve_cm_s,jitter,gt_jitter\n";
    for (const auto& r : reports) {
      csv << r.dropped_sensors << ',' << r.mpjre_deg.mean << ',' << r.mpjpe_cm.mean << ','
          << r.mpjve_cm_s << ',' << r.jitter << ',' << r.gt_jitter << "\n";
    }
  } else {
    csv << reports.front().ToCsv();
  }
  const std::string csv_path =
      a.csv.empty() ? fs::path(a.out).replace_extension(".csv").string() : a.csv;
  AtomicWriteText(csv_path, csv.str());
  PrintJson({{"report", a.out}, {"csv", csv_path}, {"config_hash", c.Hash()}, {"seed", c.seed}});
}

// --- plot ---------------------------------------------------------------

struct PlotArgs {
  std::string csv;
  std::string out;
  std::string x;
  std::vector<std::string> y;
  std::string title;
  bool log_y = false;
};

void RunPlot(const Globals& g, const PlotArgs& a) {
  RunConfig c = ResolveConfig(g);
  Finalize(c);
  const CsvTable table = ReadCsv(a.csv);
  PlotSpec spec;
  spec.title = a.title.empty() ? fs::path(a.csv).filename().string() : a.title;
  spec.x_label = a.x;
  spec.y_label = a.y.size() == 1 ? a.y.front() : "value";
  spec.log_y = a.log_y;
  std::ostringstream meta;
  meta << "plot " << StampLine(c) << "; source " << a.csv;
  for (const auto& line : table.comments) meta << "; " << line;
  spec.metadata = meta.str();
  const std::vector<double> xs = table.Column(a.x);
  for (const auto& name : a.y) spec.series.push_back({name, xs, table.Column(name)});
  AtomicWriteText(a.out, LinePlotSvg(spec));
  PrintJson({{"out", a.out}, {"config_hash", c.Hash()}, {"seed", c.seed}});
}

int ErrorExit(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

int Main(int argc, char** argv) {
  CLI::App app{"Pose estimation from loosely attached IMUs with diffusion models."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Override the config seed");
  app.add_option("--config", g.config_path, "YAML run config")->check(CLI::ExistingFile);
  app.add_option("--profile", g.profile, "Model size profile")
      ->check(CLI::IsMember({"tiny", "full"}));

  const auto body_check = CLI::IsMember({"upper", "whole"});

  MotionArgs motion;
  auto* motion_cmd = app.add_subcommand("motion", "Generate a procedural motion container");
  motion_cmd->add_option("--out", motion.out, "Output container directory")->required();
  motion_cmd->add_option("--frames", motion.frames, "Frame count (default: motion_minutes)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate tight and loose IMU corpora");
  sim_cmd->add_option("--out", sim.out, "Corpus directory")->required();
  sim_cmd->add_option("--clips", sim.clips, "Procedural motions to generate")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--frames", sim.frames, "Frames per motion (default: motion_minutes)");
  sim_cmd->add_option("--body", sim.body, "Sensor set")->check(body_check);
  sim_cmd->add_option("--garments", sim.garments, "Garment from the config or the built-in grid")
      ->check(CLI::IsMember({"config", "grid"}));
  sim_cmd->add_option("--motion", sim.motions, "Existing motion container(s) to simulate");

  auto add_train_options = [&](CLI::App* cmd, TrainArgs& t) {
    cmd->add_option("--corpus", t.corpus, "Corpus directory")->required();
    cmd->add_option("--out", t.out, "Checkpoint path")->required();
    cmd->add_option("--body", t.body, "Assert the corpus sensor set")
        ->check(CLI::IsMember({"auto", "upper", "whole"}));
    cmd->add_option("--track", t.track, "Loose track used for training");
    cmd->add_option("--resume", t.resume, "Continue from a checkpoint");
    cmd->add_option("--loss-csv", t.loss_csv, "Loss curve CSV (default: <out>.loss.csv)");
    cmd->add_option("--steps", t.steps, "Override train.steps");
    cmd->add_option("--batch", t.batch, "Override train.batch");
    cmd->add_option("--lr", t.lr, "Override train.learning_rate");
  };
  TrainArgs train_sec;
  auto* sec_cmd = app.add_subcommand("train-secondary", "Train the loose-IMU generator");
  add_train_options(sec_cmd, train_sec);
  TrainArgs train_pose;
  auto* pose_cmd = app.add_subcommand("train-pose", "Train a pose estimator");
  add_train_options(pose_cmd, train_pose);
  pose_cmd->add_option("--variant", train_pose.variant, "Model variant")
      ->check(CLI::IsMember({"unaware", "aware", "unconditional", "pose-only"}));

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Add generated and blended loose tracks");
  synth_cmd->add_option("--corpus", synth.corpus, "Corpus directory, updated in place")
      ->required();
  synth_cmd->add_option("--secondary", synth.secondary, "Secondary checkpoint")->required();
  synth_cmd->add_option("--alpha-source", synth.alpha_source, "Blend weight source")
      ->check(CLI::IsMember({"fixed", "window", "sequence"}));
  synth_cmd->add_option("--alpha", synth.alpha, "Blend weight for --alpha-source fixed");

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "Run a trained model");
  infer_cmd->add_option("--model", infer.model, "Checkpoint")->required();
  infer_cmd->add_option("--mode", infer.mode, "batch or stream")
      ->check(CLI::IsMember({"batch", "stream"}));
  infer_cmd->add_option("--method", infer.method, "Batch sampler: stream or chunked")
      ->check(CLI::IsMember({"stream", "chunked"}));
  infer_cmd->add_option("--in", infer.in, "Input container (batch)");
  infer_cmd->add_option("--out", infer.out, "Output container (batch)");
  infer_cmd->add_option("--track", infer.track, "Observed loose track (batch)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a pose model on a corpus");
  eval_cmd->add_option("--model", eval.model, "Checkpoint")->required();
  eval_cmd->add_option("--corpus", eval.corpus, "Test corpus")->required();
  eval_cmd->add_option("--out", eval.out, "JSON report path")->required();
  eval_cmd->add_option("--csv", eval.csv, "CSV path (default: report with .csv)");
  eval_cmd->add_option("--track", eval.track, "Observed loose track");
  eval_cmd->add_option("--method", eval.method, "stream or chunked")
      ->check(CLI::IsMember({"stream", "chunked"}));
  eval_cmd->add_option("--missing", eval.missing, "Sensors dropped")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--policy", eval.policy, "Dropped-sensor fill")
      ->check(CLI::IsMember({"zero", "freeze"}));
  eval_cmd->add_option("--sweep", eval.sweep, "Evaluate 0..K dropped sensors")
      ->check(CLI::NonNegativeNumber);

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render CSV columns as an SVG line chart");
  plot_cmd->add_option("--csv", plot.csv, "Input CSV")->required();
  plot_cmd->add_option("--out", plot.out, "Output SVG")->required();
  plot_cmd->add_option("--x", plot.x, "X column")->required();
  plot_cmd->add_option("--y", plot.y, "Y column(s)")->required();
  plot_cmd->add_option("--title", plot.title, "Chart title");
  plot_cmd->add_flag("--log-y", plot.log_y, "Logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ErrorExit("usage_error", e.what(), kUsageExit);
  }

  try {
    if (*motion_cmd) RunMotion(g, motion);
    if (*sim_cmd) RunSimulate(g, sim);
    if (*sec_cmd) RunTrain(g, train_sec, true);
    if (*pose_cmd) RunTrain(g, train_pose, false);
    if (*synth_cmd) RunSynth(g, synth);
    if (*infer_cmd) RunInfer(g, infer);
    if (*eval_cmd) RunEval(g, eval);
    if (*plot_cmd) RunPlot(g, plot);
  } catch (const Error& e) {
    return ErrorExit(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return ErrorExit("internal_error", e.what(), 1);
  }
  return 0;
}

}  // namespace
}  // namespace looseimu::tools

int main(int argc, char** argv) { return looseimu::tools::Main(argc, argv); }
