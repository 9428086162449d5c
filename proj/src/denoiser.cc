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

#include "looseimu/denoiser.h"

#include <cmath>

#include "looseimu/errors.h"

namespace looseimu {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)

double Gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x)));
}

double GeluGrad(double x) {
  const double u = kGeluC * (x + 0.044715 * x * x * x);
  const double th = std::tanh(u);
  const double du = kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
  return 0.5 * (1.0 + th) + 0.5 * x * (1.0 - th * th) * du;
}

Matrix ApplyGelu(const Matrix& x) { return x.unaryExpr(&Gelu); }

Matrix DropoutMask(int rows, int cols, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(1.0 - p);
  Matrix m(rows, cols);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = keep(rng) ? scale : 0.0;
  return m;
}

}  // namespace

RowVector SinusoidalEmbedding(double position, int width) {
  RowVector e = RowVector::Zero(width);
  const int half = width / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / std::max(1, half));
    e[i] = std::sin(position * freq);
    e[half + i] = std::cos(position * freq);
  }
  return e;
}

void DenoiserConfig::Validate() const {
  if (encoder_blocks < 0 || decoder_blocks < 0)
    throw ConfigError("block counts must be >= 0");
  if (model_width < 2 || model_width % 2 != 0)
    throw ConfigError("model width must be even and >= 2");
  if (attention_heads < 1 || model_width % attention_heads != 0)
    throw ConfigError("attention heads must divide model width");
  if (window_frames < 2) throw ConfigError("window must hold >= 2 frames");
  if (output_width < 1) throw ConfigError("output width must be >= 1");
  if (condition_width < 0) throw ConfigError("condition width must be >= 0");
  int sum = 0;
  int nonempty = 0;
  for (int w : input_part_widths) {
    if (w < 0) throw ConfigError("part widths must be >= 0");
    sum += w;
    nonempty += w > 0 ? 1 : 0;
  }
  if (sum != InputWidth()) {
    throw ConfigError("input part widths sum to " + std::to_string(sum) +
                      ", expected " + std::to_string(InputWidth()));
  }
  if (nonempty == 0) throw ConfigError("at least one input part is required");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout in [0, 1)");
  if (conv_kernel < 1 || ff_multiplier < 1)
    throw ConfigError("kernel and FF multiplier must be >= 1");
}

DenoiserConfig DenoiserConfig::Tiny(std::array<int, 4> parts,
                                    int condition_width, int output_width,
                                    int window_frames) {
  DenoiserConfig c;
  c.encoder_blocks = 1;
  c.decoder_blocks = 1;
  c.model_width = 16;
  c.attention_heads = 2;
  c.window_frames = window_frames;
  c.input_part_widths = parts;
  c.condition_width = condition_width;
  c.output_width = output_width;
  return c;
}

DenoiserConfig DenoiserConfig::Full(std::array<int, 4> parts,
                                    int condition_width, int output_width,
                                    int window_frames) {
  DenoiserConfig c = Tiny(parts, condition_width, output_width, window_frames);
  c.encoder_blocks = 4;
  c.decoder_blocks = 4;
  c.model_width = 256;
  c.attention_heads = 4;
  c.dropout = 0.1;
  return c;
}

size_t Denoiser::ExpectedParameterCount(const DenoiserConfig& c) {
  const size_t d = c.model_width;
  const size_t k = c.conv_kernel;
  const size_t m = c.ff_multiplier;
  const size_t o = c.output_width;
  size_t total = 0;
  size_t parts = 0;
  for (int w : c.input_part_widths) {
    if (w > 0) {
      total += k * w * d + d;
      ++parts;
    }
  }
  total += parts * d * d + d;
  total += d * d + d;
  const size_t block = 2 * (2 * d) + (3 * d * d + 3 * d) + (d * d + d) +
                       2 * m * d * d + m * d + d;
  total += block * (c.encoder_blocks + c.decoder_blocks);
  total += 2 * d + d * o + o;
  return total;
}

int Denoiser::AddParam(const std::string& name, int rows, int cols) {
  params_.push_back({name, Matrix::Zero(rows, cols)});
  return static_cast<int>(params_.size()) - 1;
}

Denoiser::Linear Denoiser::AddLinear(const std::string& name, int in, int out,
                                     double scale, std::mt19937_64& rng) {
  Linear l;
  l.w = AddParam(name + ".weight", in, out);
  l.b = AddParam(name + ".bias", 1, out);
  std::normal_distribution<double> normal(0.0, scale / std::sqrt(in));
  Matrix& w = params_[l.w].value;
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = normal(rng);
  return l;
}

Denoiser::LayerNorm Denoiser::AddLayerNorm(const std::string& name, int width) {
  LayerNorm ln;
  ln.gain = AddParam(name + ".gain", 1, width);
  ln.bias = AddParam(name + ".bias", 1, width);
  params_[ln.gain].value.setOnes();
  return ln;
}

Denoiser::Denoiser(const DenoiserConfig& config, uint64_t seed)
    : config_(config) {
  config_.Validate();
  std::mt19937_64 rng(seed);
  const int d = config_.model_width;
  int parts = 0;
  for (int p = 0; p < 4; ++p) {
    const int w = config_.input_part_widths[p];
    if (w == 0) continue;
    conv_[p] = AddLinear("embed.conv" + std::to_string(p),
                         config_.conv_kernel * w, d, 1.0, rng);
    ++parts;
  }
  fuse_ = AddLinear("embed.fuse", parts * d, d, 1.0, rng);
  time_ = AddLinear("embed.time", d, d, 1.0, rng);
  const int hidden = config_.ff_multiplier * d;
  const int total_blocks = config_.encoder_blocks + config_.decoder_blocks;
  const double residual_scale = 1.0 / std::sqrt(2.0 * std::max(1, total_blocks));
  for (int b = 0; b < total_blocks; ++b) {
    const std::string prefix =
        b < config_.encoder_blocks
            ? "encoder." + std::to_string(b)
            : "decoder." + std::to_string(b - config_.encoder_blocks);
    Block blk;
    blk.ln1 = AddLayerNorm(prefix + ".ln1", d);
    blk.qkv = AddLinear(prefix + ".attn.qkv", d, 3 * d, 1.0, rng);
    blk.proj = AddLinear(prefix + ".attn.proj", d, d, residual_scale, rng);
    blk.ln2 = AddLayerNorm(prefix + ".ln2", d);
    blk.ff1 = AddLinear(prefix + ".ff1", d, hidden, 1.0, rng);
    blk.ff2 = AddLinear(prefix + ".ff2", hidden, d, residual_scale, rng);
    blocks_.push_back(blk);
  }
  final_ln_ = AddLayerNorm("head.ln", d);
  head_ = AddLinear("head.out", d, config_.output_width, 1.0, rng);

  positional_.resize(config_.window_frames, d);
  for (int i = 0; i < config_.window_frames; ++i)
    positional_.row(i) = SinusoidalEmbedding(i, d);
}

size_t Denoiser::ParameterCount() const {
  size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

Gradients Denoiser::ZeroGradients() const {
  Gradients g;
  g.reserve(params_.size());
  for (const auto& p : params_)
    g.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  return g;
}

Matrix Denoiser::LinearForward(const Linear& l, const Matrix& x) const {
  Matrix y = x * params_[l.w].value;
  y.rowwise() += params_[l.b].value.row(0);
  return y;
}

Matrix Denoiser::LinearBackward(const Linear& l, const Matrix& x,
                                const Matrix& dy, Gradients& grads,
                                bool need_dx) const {
  grads[l.w].noalias() += x.transpose() * dy;
  grads[l.b] += dy.colwise().sum();
  if (!need_dx) return Matrix();
  return dy * params_[l.w].value.transpose();
}

Matrix Denoiser::LayerNormForward(const LayerNorm& ln, const Matrix& x,
                                  LayerNormCache* cache) const {
  const Eigen::Index rows = x.rows();
  const double width = static_cast<double>(x.cols());
  Matrix xhat(rows, x.cols());
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double mean = x.row(r).sum() / width;
    const auto centered = x.row(r).array() - mean;
    const double var = centered.square().sum() / width;
    inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    xhat.row(r) = centered * inv_std[r];
  }
  Matrix y = xhat.array().rowwise() * params_[ln.gain].value.row(0).array();
  y.rowwise() += params_[ln.bias].value.row(0);
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

Matrix Denoiser::LayerNormBackward(const LayerNorm& ln,
                                   const LayerNormCache& cache,
                                   const Matrix& dy, Gradients& grads) const {
  grads[ln.gain] += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  grads[ln.bias] += dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * params_[ln.gain].value.row(0).array();
  const double width = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_d = dxhat.row(r).sum() / width;
    const double mean_dx = dxhat.row(r).dot(cache.xhat.row(r)) / width;
    dx.row(r) = (dxhat.row(r).array() - mean_d -
                 cache.xhat.row(r).array() * mean_dx) *
                cache.inv_std[r];
  }
  return dx;
}

Matrix Denoiser::CausalConvColumns(const Matrix& x, int col0, int width,
                                   int batch) const {
  const int n = config_.window_frames;
  const int k = config_.conv_kernel;
  Matrix cols = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(k) * width);
  for (int b = 0; b < batch; ++b) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k && j <= i; ++j) {
        cols.block(b * n + i, j * width, 1, width) =
            x.block(b * n + i - j, col0, 1, width);
      }
    }
  }
  return cols;
}

Matrix Denoiser::Embed(const Matrix& z, std::span<const int> t,
                       const Matrix& condition, ForwardCache* cache) const {
  const int n = config_.window_frames;
  const int batch = static_cast<int>(t.size());
  if (batch < 1) throw ShapeError("denoiser: empty batch");
  if (z.rows() != static_cast<Eigen::Index>(batch) * n ||
      z.cols() != config_.output_width) {
    throw ShapeError("denoiser: z_t must be (B*N) x " +
                     std::to_string(config_.output_width));
  }
  if (condition.rows() != z.rows() ||
      condition.cols() != config_.condition_width) {
    throw ShapeError("denoiser: condition must be (B*N) x " +
                     std::to_string(config_.condition_width));
  }
  const int d = config_.model_width;
  Matrix input(z.rows(), config_.InputWidth());
  input.leftCols(z.cols()) = z;
  if (condition.cols() > 0) input.rightCols(condition.cols()) = condition;

  int parts = 0;
  for (int w : config_.input_part_widths) parts += w > 0 ? 1 : 0;
  Matrix fused_in(z.rows(), parts * d);
  int col0 = 0;
  int slot = 0;
  for (int p = 0; p < 4; ++p) {
    const int w = config_.input_part_widths[p];
    if (w == 0) continue;
    Matrix cols = CausalConvColumns(input, col0, w, batch);
    Matrix pre = LinearForward(conv_[p], cols);
    fused_in.middleCols(slot * d, d) = ApplyGelu(pre);
    if (cache) {
      cache->conv_cols[p] = std::move(cols);
      cache->conv_pre[p] = std::move(pre);
    }
    col0 += w;
    ++slot;
  }
  Matrix tokens = LinearForward(fuse_, fused_in);

  Matrix time_features(batch, d);
  for (int b = 0; b < batch; ++b)
    time_features.row(b) = SinusoidalEmbedding(t[b], d);
  const Matrix time_out = LinearForward(time_, time_features);
  for (int b = 0; b < batch; ++b) {
    tokens.middleRows(b * n, n).rowwise() += time_out.row(b);
    tokens.middleRows(b * n, n) += positional_;
  }
  if (cache) {
    cache->batch = batch;
    cache->t.assign(t.begin(), t.end());
    cache->fused_in = std::move(fused_in);
    cache->time_features = std::move(time_features);
  }
  return tokens;
}

Matrix Denoiser::BlockForward(const Block& blk, const Matrix& x, int batch,
                              BlockCache* cache, std::mt19937_64* rng) const {
  const int n = config_.window_frames;
  const int d = config_.model_width;
  const int heads = config_.attention_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool dropout = rng != nullptr && config_.dropout > 0.0;

  LayerNormCache ln1;
  Matrix h1 = LayerNormForward(blk.ln1, x, cache ? &ln1 : nullptr);
  Matrix qkv = LinearForward(blk.qkv, h1);
  Matrix concat(x.rows(), d);
  std::vector<Matrix> probs;
  if (cache) probs.reserve(static_cast<size_t>(batch) * heads);
  for (int b = 0; b < batch; ++b) {
    for (int h = 0; h < heads; ++h) {
      const auto q = qkv.block(b * n, h * dh, n, dh);
      const auto k = qkv.block(b * n, d + h * dh, n, dh);
      const auto v = qkv.block(b * n, 2 * d + h * dh, n, dh);
      Matrix s = (q * k.transpose()) * scale;
      for (int i = 0; i < n; ++i) {
        const double mx = s.row(i).head(i + 1).maxCoeff();
        double sum = 0.0;
        for (int j = 0; j <= i; ++j) {
          s(i, j) = std::exp(s(i, j) - mx);
          sum += s(i, j);
        }
        for (int j = 0; j <= i; ++j) s(i, j) /= sum;
        for (int j = i + 1; j < n; ++j) s(i, j) = 0.0;
      }
      concat.block(b * n, h * dh, n, dh).noalias() = s * v;
      if (cache) probs.push_back(std::move(s));
    }
  }
  Matrix attn = LinearForward(blk.proj, concat);
  Matrix drop1;
  if (dropout) {
    drop1 = DropoutMask(attn.rows(), attn.cols(), config_.dropout, *rng);
    attn = attn.cwiseProduct(drop1);
  }
  Matrix mid = x + attn;

  LayerNormCache ln2;
  Matrix h2 = LayerNormForward(blk.ln2, mid, cache ? &ln2 : nullptr);
  Matrix ff_pre = LinearForward(blk.ff1, h2);
  Matrix ff_act = ApplyGelu(ff_pre);
  Matrix ff_out = LinearForward(blk.ff2, ff_act);
  Matrix drop2;
  if (dropout) {
    drop2 = DropoutMask(ff_out.rows(), ff_out.cols(), config_.dropout, *rng);
    ff_out = ff_out.cwiseProduct(drop2);
  }
  Matrix out = mid + ff_out;
  if (cache) {
    cache->input = x;
    cache->ln1 = std::move(ln1);
    cache->ln1_out = std::move(h1);
    cache->qkv = std::move(qkv);
    cache->probs = std::move(probs);
    cache->attn_concat = std::move(concat);
    cache->drop1 = std::move(drop1);
    cache->mid = std::move(mid);
    cache->ln2 = std::move(ln2);
    cache->ln2_out = std::move(h2);
    cache->ff_pre = std::move(ff_pre);
    cache->ff_act = std::move(ff_act);
    cache->drop2 = std::move(drop2);
  }
  return out;
}

Matrix Denoiser::BlockBackward(const Block& blk, const BlockCache& c,
                               int batch, const Matrix& dy,
                               Gradients& grads) const {
  const int n = config_.window_frames;
  const int d = config_.model_width;
  const int heads = config_.attention_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  // out = mid + drop2 * ff2(gelu(ff1(ln2(mid))))
  Matrix d_ff_out = c.drop2.size() > 0 ? Matrix(dy.cwiseProduct(c.drop2)) : dy;
  Matrix d_ff_act = LinearBackward(blk.ff2, c.ff_act, d_ff_out, grads);
  Matrix d_ff_pre =
      d_ff_act.cwiseProduct(c.ff_pre.unaryExpr(&GeluGrad));
  Matrix d_h2 = LinearBackward(blk.ff1, c.ln2_out, d_ff_pre, grads);
  Matrix d_mid = dy + LayerNormBackward(blk.ln2, c.ln2, d_h2, grads);

  // mid = x + drop1 * proj(attention(ln1(x)))
  Matrix d_attn = c.drop1.size() > 0 ? Matrix(d_mid.cwiseProduct(c.drop1)) : d_mid;
  Matrix d_concat = LinearBackward(blk.proj, c.attn_concat, d_attn, grads);
  Matrix d_qkv = Matrix::Zero(c.qkv.rows(), c.qkv.cols());
  for (int b = 0; b < batch; ++b) {
    for (int h = 0; h < heads; ++h) {
      const Matrix& p = c.probs[static_cast<size_t>(b) * heads + h];
      const auto q = c.qkv.block(b * n, h * dh, n, dh);
      const auto k = c.qkv.block(b * n, d + h * dh, n, dh);
      const auto v = c.qkv.block(b * n, 2 * d + h * dh, n, dh);
      const auto d_o = d_concat.block(b * n, h * dh, n, dh);
      const Matrix d_p = d_o * v.transpose();
      d_qkv.block(b * n, 2 * d + h * dh, n, dh).noalias() = p.transpose() * d_o;
      Matrix d_s(n, n);
      for (int i = 0; i < n; ++i) {
        const double dot = d_p.row(i).dot(p.row(i));
        d_s.row(i) = p.row(i).array() * (d_p.row(i).array() - dot);
      }
      d_s *= scale;
      d_qkv.block(b * n, h * dh, n, dh).noalias() = d_s * k;
      d_qkv.block(b * n, d + h * dh, n, dh).noalias() = d_s.transpose() * q;
    }
  }
  Matrix d_h1 = LinearBackward(blk.qkv, c.ln1_out, d_qkv, grads);
  return d_mid + LayerNormBackward(blk.ln1, c.ln1, d_h1, grads);
}

Matrix Denoiser::Forward(const Matrix& z, std::span<const int> t,
                         const Matrix& condition, ForwardCache* cache,
                         std::mt19937_64* dropout_rng) const {
  const int batch = static_cast<int>(t.size());
  Matrix x = Embed(z, t, condition, cache);
  if (cache) cache->blocks.resize(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    x = BlockForward(blocks_[i], x, batch, cache ? &cache->blocks[i] : nullptr,
                     dropout_rng);
  }
  LayerNormCache ln;
  Matrix h = LayerNormForward(final_ln_, x, cache ? &ln : nullptr);
  Matrix out = LinearForward(head_, h);
  if (cache) {
    cache->final_in = std::move(x);
    cache->final_ln = std::move(ln);
    cache->head_in = std::move(h);
  }
  return out;
}

void Denoiser::Backward(const ForwardCache& c, const Matrix& d_output,
                        Gradients& grads) const {
  if (grads.size() != params_.size()) throw ShapeError("gradient set mismatch");
  const int n = config_.window_frames;
  const int d = config_.model_width;
  Matrix dx = LinearBackward(head_, c.head_in, d_output, grads);
  dx = LayerNormBackward(final_ln_, c.final_ln, dx, grads);
  for (size_t i = blocks_.size(); i-- > 0;) {
    dx = BlockBackward(blocks_[i], c.blocks[i], c.batch, dx, grads);
  }
  // tokens = fuse(fused_in) + time(time_features) per batch + positional
  Matrix d_time(c.batch, d);
  for (int b = 0; b < c.batch; ++b)
    d_time.row(b) = dx.middleRows(b * n, n).colwise().sum();
  LinearBackward(time_, c.time_features, d_time, grads, false);
  Matrix d_fused = LinearBackward(fuse_, c.fused_in, dx, grads);
  int slot = 0;
  for (int p = 0; p < 4; ++p) {
    if (config_.input_part_widths[p] == 0) continue;
    const Matrix d_pre = d_fused.middleCols(slot * d, d).cwiseProduct(
        c.conv_pre[p].unaryExpr(&GeluGrad));
    LinearBackward(conv_[p], c.conv_cols[p], d_pre, grads, false);
    ++slot;
  }
}

}  // namespace looseimu
