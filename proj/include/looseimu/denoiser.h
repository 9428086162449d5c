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

#ifndef LOOSEIMU_DENOISER_H_
#define LOOSEIMU_DENOISER_H_

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "looseimu/tensor.h"

namespace looseimu {

// Transformer autoencoder used by every diffusion model. The network input
// is concat(z_t, condition) along features, split into four contiguous
// parts, each with its own causal 1-D convolution. A part may be empty.
struct DenoiserConfig {
  int encoder_blocks = 4;
  int decoder_blocks = 4;
  int model_width = 256;
  int attention_heads = 4;
  int window_frames = 60;
  std::array<int, 4> input_part_widths = {0, 0, 0, 0};
  int condition_width = 0;
  int output_width = 0;
  double dropout = 0.0;
  int conv_kernel = 3;
  int ff_multiplier = 4;

  int InputWidth() const { return output_width + condition_width; }
  // Throws ConfigError on inconsistent sizes.
  void Validate() const;
  // 16 wide, 1 + 1 blocks, 2 heads.
  static DenoiserConfig Tiny(std::array<int, 4> parts, int condition_width,
                             int output_width, int window_frames);
  // 256 wide, 4 + 4 blocks, 4 heads.
  static DenoiserConfig Full(std::array<int, 4> parts, int condition_width,
                             int output_width, int window_frames);
};

struct Parameter {
  std::string name;
  Matrix value;
};

using Gradients = std::vector<Matrix>;

struct LayerNormCache {
  Matrix xhat;
  Eigen::VectorXd inv_std;
};

struct BlockCache {
  Matrix input;
  LayerNormCache ln1;
  Matrix ln1_out;
  Matrix qkv;
  std::vector<Matrix> probs;  // batch * heads, each N x N
  Matrix attn_concat;
  Matrix drop1;
  Matrix mid;
  LayerNormCache ln2;
  Matrix ln2_out;
  Matrix ff_pre;
  Matrix ff_act;
  Matrix drop2;
};

struct ForwardCache {
  int batch = 0;
  std::vector<int> t;
  std::array<Matrix, 4> conv_cols;
  std::array<Matrix, 4> conv_pre;
  Matrix fused_in;
  Matrix time_features;
  std::vector<BlockCache> blocks;
  Matrix final_in;
  LayerNormCache final_ln;
  Matrix head_in;
};

class Denoiser {
 public:
  Denoiser() = default;
  Denoiser(const DenoiserConfig& config, uint64_t seed);

  const DenoiserConfig& config() const { return config_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  size_t ParameterCount() const;
  // Closed form; equals ParameterCount() for a constructed model:
  //   embed  = sum_p [w_p > 0] (k w_p d + d) + (P d^2 + d) + (d^2 + d)
  //   block  = 2 (2d) + (3d^2 + 3d) + (d^2 + d) + 2 m d^2 + m d + d
  //   head   = 2d + d o + o
  // with P non-empty parts, kernel k, width d, FF multiplier m, output o.
  static size_t ExpectedParameterCount(const DenoiserConfig& config);

  // z: (B*N) x output_width, t: B steps, condition: (B*N) x condition_width.
  // Tokens (B*N) x model_width after convolutions, time injection and
  // positional encoding.
  Matrix Embed(const Matrix& z, std::span<const int> t, const Matrix& condition,
               ForwardCache* cache = nullptr) const;
  // Returns the x0 estimate, (B*N) x output_width. Passing `dropout_rng`
  // enables training-mode dropout.
  Matrix Forward(const Matrix& z, std::span<const int> t,
                 const Matrix& condition, ForwardCache* cache = nullptr,
                 std::mt19937_64* dropout_rng = nullptr) const;
  // Accumulates dLoss/dparam into `grads` given dLoss/doutput.
  void Backward(const ForwardCache& cache, const Matrix& d_output,
                Gradients& grads) const;
  Gradients ZeroGradients() const;

 private:
  struct Linear {
    int w = -1;
    int b = -1;
  };
  struct LayerNorm {
    int gain = -1;
    int bias = -1;
  };
  struct Block {
    LayerNorm ln1;
    Linear qkv;
    Linear proj;
    LayerNorm ln2;
    Linear ff1;
    Linear ff2;
  };

  int AddParam(const std::string& name, int rows, int cols);
  Linear AddLinear(const std::string& name, int in, int out, double scale,
                   std::mt19937_64& rng);
  LayerNorm AddLayerNorm(const std::string& name, int width);

  Matrix LinearForward(const Linear& l, const Matrix& x) const;
  Matrix LinearBackward(const Linear& l, const Matrix& x, const Matrix& dy,
                        Gradients& grads, bool need_dx = true) const;
  Matrix LayerNormForward(const LayerNorm& ln, const Matrix& x,
                          LayerNormCache* cache) const;
  Matrix LayerNormBackward(const LayerNorm& ln, const LayerNormCache& cache,
                           const Matrix& dy, Gradients& grads) const;
  Matrix BlockForward(const Block& blk, const Matrix& x, int batch,
                      BlockCache* cache, std::mt19937_64* rng) const;
  Matrix BlockBackward(const Block& blk, const BlockCache& cache, int batch,
                       const Matrix& dy, Gradients& grads) const;
  Matrix CausalConvColumns(const Matrix& x, int col0, int width,
                           int batch) const;

  DenoiserConfig config_;
  std::vector<Parameter> params_;
  std::array<Linear, 4> conv_;
  Linear fuse_;
  Linear time_;
  std::vector<Block> blocks_;  // encoder blocks, then decoder blocks
  LayerNorm final_ln_;
  Linear head_;
  Matrix positional_;  // N x d
};

// Standard sinusoidal features of a scalar position: [sin(p w_i), cos(p w_i)]
// with w_i = 10000^(-i / (d/2)).
RowVector SinusoidalEmbedding(double position, int width);

}  // namespace looseimu

#endif  // LOOSEIMU_DENOISER_H_
