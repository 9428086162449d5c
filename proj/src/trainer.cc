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

#include "looseimu/trainer.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

bool UsesConsistency(ModelKind kind) {
  return kind == ModelKind::kConditional || kind == ModelKind::kGarmentAware ||
         kind == ModelKind::kUnconditional;
}

void DumpBatch(const std::filesystem::path& path, std::span<const int> t,
               const Matrix& target, const Matrix& observation,
               const Matrix& pred) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << std::setprecision(9);
  out << "# t:";
  for (int s : t) out << ' ' << s;
  out << "\n";
  auto dump = [&out](const char* name, const Matrix& m) {
    out << "# " << name << " " << m.rows() << "x" << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        out << (c ? "," : "") << m(r, c);
      out << "\n";
    }
  };
  dump("target", target);
  dump("observation", observation);
  dump("prediction", pred);
}

}  // namespace

WindowDataset::WindowDataset(int window_frames, int stride)
    : window_(window_frames), stride_(stride) {
  if (window_frames < 2) throw ConfigError("window must hold >= 2 frames");
  if (stride < 1) throw ConfigError("window stride must be >= 1");
}

void WindowDataset::Add(RecordingFeatures recording) {
  if (recording.target.rows() != recording.observation.rows()) {
    throw ShapeError("recording target and observation differ in frames");
  }
  if (!recordings_.empty() &&
      (recording.target.cols() != recordings_[0].target.cols() ||
       recording.observation.cols() != recordings_[0].observation.cols())) {
    throw ShapeError("recording widths differ from the dataset");
  }
  const size_t id = recordings_.size();
  const int frames = static_cast<int>(recording.target.rows());
  for (int start = 0; start + window_ <= frames; start += stride_)
    index_.push_back({id, start});
  recordings_.push_back(std::move(recording));
}

void WindowDataset::Gather(std::span<const size_t> windows, Matrix* target,
                           Matrix* observation) const {
  if (recordings_.empty()) throw ValidationError("empty dataset");
  const Eigen::Index rows = static_cast<Eigen::Index>(windows.size()) * window_;
  target->resize(rows, recordings_[0].target.cols());
  observation->resize(rows, recordings_[0].observation.cols());
  for (size_t i = 0; i < windows.size(); ++i) {
    const auto [rec, start] = index_.at(windows[i]);
    target->middleRows(i * window_, window_) =
        recordings_[rec].target.middleRows(start, window_);
    observation->middleRows(i * window_, window_) =
        recordings_[rec].observation.middleRows(start, window_);
  }
}

Normalizer WindowDataset::FitTargetNormalizer() const {
  std::vector<const Matrix*> data;
  for (const auto& r : recordings_) data.push_back(&r.target);
  return Normalizer::Fit(data);
}

Normalizer WindowDataset::FitObservationNormalizer() const {
  std::vector<const Matrix*> data;
  for (const auto& r : recordings_) data.push_back(&r.observation);
  return Normalizer::Fit(data);
}

BatchLoss ComputeBatchLoss(const DiffusionModel& model,
                           const Matrix& target_norm,
                           const Matrix& raw_observation,
                           std::span<const int> t, const Matrix& noise,
                           const TrainConfig& config, std::mt19937_64& rng) {
  const FeatureLayout& layout = model.layout();
  const int n = model.window();
  const int batch = static_cast<int>(t.size());
  if (target_norm.rows() != static_cast<Eigen::Index>(batch) * n) {
    throw ShapeError("batch rows do not match windows * frames");
  }
  Matrix z(target_norm.rows(), target_norm.cols());
  for (int b = 0; b < batch; ++b) {
    z.middleRows(b * n, n) = QSample(target_norm.middleRows(b * n, n), t[b],
                                     noise.middleRows(b * n, n),
                                     model.schedule());
  }

  Matrix observation = raw_observation;
  if (config.sensor_dropout > 0.0 && layout.kind != ModelKind::kSecondary) {
    std::bernoulli_distribution drop(config.sensor_dropout);
    const int ns = static_cast<int>(layout.sensors.size());
    for (int b = 0; b < batch; ++b) {
      for (int s = 0; s < ns; ++s) {
        if (drop(rng)) {
          observation.block(b * n, s * kSensorChannels, n, kSensorChannels)
              .setZero();
        }
      }
    }
  }
  Matrix loose_mask;
  if (layout.kind == ModelKind::kUnconditional)
    loose_mask = RootSensorMask(layout, static_cast<int>(z.rows()));
  const Matrix cond = model.NetworkCondition(
      observation, loose_mask.size() ? &loose_mask : nullptr);

  const Denoiser& net = model.denoiser();
  std::mt19937_64* dropout_rng = net.config().dropout > 0.0 ? &rng : nullptr;
  ForwardCache cache;
  const Matrix pred = net.Forward(z, t, cond, &cache, dropout_rng);

  BatchLoss out;
  out.grads = net.ZeroGradients();
  Matrix grad_pred = Matrix::Zero(pred.rows(), pred.cols());
  const bool consistency =
      UsesConsistency(layout.kind) && config.weights.consistency > 0.0;
  Matrix noisy_pred;
  Matrix grad_noisy;
  ForwardCache noisy_cache;
  if (consistency) {
    Matrix noisy_cond = cond;
    if (layout.kind == ModelKind::kUnconditional) {
      const int lw = layout.loose.width;
      noisy_cond.leftCols(lw) =
          ConsistencyCondition(Matrix(cond.leftCols(lw)), rng,
                               config.consistency_scale);
    } else {
      noisy_cond = ConsistencyCondition(cond, rng, config.consistency_scale);
    }
    noisy_pred = net.Forward(z, t, noisy_cond, &noisy_cache, dropout_rng);
    grad_noisy = Matrix::Zero(pred.rows(), pred.cols());
  }

  LossWeights weights = config.weights;
  if (!consistency) weights.consistency = 0.0;
  switch (layout.kind) {
    case ModelKind::kSecondary: {
      const double v = SecondaryLoss(target_norm, pred, &grad_pred);
      out.loss.terms.push_back({"l1", 1.0, v});
      out.loss.total = v;
      break;
    }
    case ModelKind::kConditional:
    case ModelKind::kGarmentAware:
      out.loss = PoseLoss(pred, target_norm, layout, weights,
                          consistency ? &noisy_pred : nullptr, &grad_pred,
                          consistency ? &grad_noisy : nullptr);
      break;
    case ModelKind::kUnconditional:
      out.loss = UnconditionalLoss(pred, target_norm, layout, weights,
                                   loose_mask,
                                   consistency ? &noisy_pred : nullptr,
                                   &grad_pred,
                                   consistency ? &grad_noisy : nullptr);
      break;
    case ModelKind::kPoseOnly:
      out.loss = PoseOnlyAblationLoss(pred, target_norm, layout,
                                      config.ablation, n, &grad_pred);
      break;
  }
  if (!std::isfinite(out.loss.total)) {
    DumpBatch(config.divergence_dump, t, target_norm, raw_observation, pred);
    throw TrainingDivergedError(
        "non-finite training loss" +
        (config.divergence_dump.empty()
             ? std::string()
             : "; batch dumped to " + config.divergence_dump.string()));
  }
  net.Backward(cache, grad_pred, out.grads);
  if (consistency) net.Backward(noisy_cache, grad_noisy, out.grads);
  return out;
}

void AdamUpdate(std::vector<Parameter>& params, const Gradients& grads,
                const OptimizerConfig& config, AdamState& state) {
  if (state.m.size() != params.size()) {
    state.m.clear();
    state.v.clear();
    for (const auto& p : params) {
      state.m.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      state.v.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  double scale = 1.0;
  if (config.grad_clip > 0.0) {
    double sq = 0.0;
    for (const auto& g : grads) sq += g.squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > config.grad_clip) scale = config.grad_clip / norm;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    const Matrix g = grads[i] * scale;
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * g;
    state.v[i] = config.beta2 * state.v[i] +
                 (1.0 - config.beta2) * g.cwiseProduct(g);
    if (config.learning_rate == 0.0) continue;
    params[i].value.array() -=
        config.learning_rate * (state.m[i].array() / bc1) /
        ((state.v[i].array() / bc2).sqrt() + config.epsilon);
  }
}

TrainResult Train(DiffusionModel& model, const WindowDataset& data,
                  const TrainConfig& config, AdamState* resume,
                  const std::function<void(const LossRecord&)>& on_log) {
  if (data.size() == 0) throw ValidationError("training dataset has no windows");
  if (data.window_frames() != model.window()) {
    throw ConfigError("dataset window differs from the model window");
  }
  if (config.batch < 1 || config.steps < 0) {
    throw ConfigError("batch must be >= 1 and steps >= 0");
  }
  const auto started = std::chrono::steady_clock::now();
  TrainResult result;
  if (resume) result.optimizer = *resume;
  std::mt19937_64 rng(config.seed ^ 0x5eedf00dULL);
  std::uniform_int_distribution<size_t> pick(0, data.size() - 1);
  std::uniform_int_distribution<int> pick_t(0, model.schedule().T());
  const int n = model.window();
  const int width = model.layout().target_width;

  std::vector<size_t> windows(config.batch);
  std::vector<int> t(config.batch);
  Matrix target;
  Matrix observation;
  LossRecord running;
  int running_count = 0;
  for (int step = 0; step < config.steps; ++step) {
    for (int b = 0; b < config.batch; ++b) {
      windows[b] = pick(rng);
      t[b] = pick_t(rng);
    }
    data.Gather(windows, &target, &observation);
    const Matrix target_norm = model.target_norm().Apply(target);
    const Matrix noise = GaussianMatrix(config.batch * n, width, rng);
    BatchLoss bl = ComputeBatchLoss(model, target_norm, observation, t, noise,
                                    config, rng);
    AdamUpdate(model.denoiser().parameters(), bl.grads, config.optimizer,
               result.optimizer);

    LossRecord rec;
    rec.step = result.optimizer.step;
    rec.total = bl.loss.total;
    rec.terms = bl.loss.terms;
    result.curve.push_back(rec);

    if (running_count == 0) running = rec;
    else {
      running.total += rec.total;
      for (size_t i = 0; i < rec.terms.size(); ++i)
        running.terms[i].value += rec.terms[i].value;
    }
    ++running_count;
    const bool last = step + 1 == config.steps;
    if (on_log && (running_count == config.log_every || last)) {
      running.step = rec.step;
      running.total /= running_count;
      for (auto& term : running.terms) term.value /= running_count;
      on_log(running);
      running_count = 0;
    }
    if (config.time_budget_seconds > 0.0) {
      const double elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
      if (elapsed > config.time_budget_seconds) break;
    }
  }
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return result;
}

void WriteLossCurveCsv(const std::vector<LossRecord>& curve,
                       const std::filesystem::path& path,
                       const std::string& comment) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write " + path.string());
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "step,total";
    if (!curve.empty())
      for (const auto& term : curve.front().terms) out << ',' << term.name;
    out << '\n' << std::setprecision(9);
    for (const auto& rec : curve) {
      out << rec.step << ',' << rec.total;
      for (const auto& term : rec.terms) out << ',' << term.value;
      out << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace looseimu
