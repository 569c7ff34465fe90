// Copyright 2026 The TCTN Authors.
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

#ifndef TCTN_MODEL_HPP_
#define TCTN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tctn/rng.hpp"
#include "tctn/tensor.hpp"

namespace tctn {

// Architecture hyperparameters. Defaults are the full-size MovingMNIST
// setup: 10 context frames, 10 predicted, 64x64x1, D=128, six blocks.
struct ModelConfig {
  std::size_t input_frames = 10;   // J
  std::size_t output_frames = 10;  // K
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t channels = 1;
  std::size_t embed_dim = 128;  // D, must be even
  std::size_t blocks = 6;
  std::size_t embed_kernel = 5;
  std::size_t tc_kernel_t = 3;
  std::size_t tc_kernel_h = 3;
  std::size_t tc_kernel_w = 3;
  double dropout = 0.1;
  double lrelu_slope = 0.01;
  // Biases on the Q/K/V convolutions. When false they are fixed at zero
  // and not listed as parameters.
  bool qkv_bias = true;
  std::uint64_t seed = 0;

  // Throws kConfig describing the first violated constraint.
  void validate() const;

  // Small configuration used by the gradient checks.
  static ModelConfig toy();

  bool operator==(const ModelConfig&) const = default;
};

enum class ParamKind { kWeight, kBias, kGamma, kBeta };

template <typename T>
struct NamedParameter {
  std::string name;
  ParamKind kind;
  Tensor<T> tensor;
};

template <typename T>
struct BlockParams {
  Tensor<T> ln1_gamma, ln1_beta;
  Tensor<T> wq, bq, wk, bk, wv, bv;
  Tensor<T> wo, bo;
  Tensor<T> ln2_gamma, ln2_beta;
  Tensor<T> wf1, bf1, wf2, bf2;
};

template <typename T>
class Model {
 public:
  // Zero weights and biases, unit layer-norm scales.
  explicit Model(const ModelConfig& config);

  // Uniform fan-in initialization: weights ~ U(-b, b) with
  // b = sqrt(1 / fan_in), zero biases, gamma = 1, beta = 0.
  static Model init(const ModelConfig& config, std::uint64_t seed);
  static Model init(const ModelConfig& config) {
    return init(config, config.seed);
  }

  const ModelConfig& config() const { return config_; }
  const std::vector<NamedParameter<T>>& parameters() const { return params_; }
  Tensor<T>& parameter(std::string_view name);
  const Tensor<T>& parameter(std::string_view name) const;
  // Total number of trainable scalars.
  std::size_t parameter_count() const;

  Model clone() const;
  void zero_grad();

  Tensor<T> embed_w1, embed_b1, embed_w2, embed_b2;
  std::vector<BlockParams<T>> blocks;
  Tensor<T> forecast_w, forecast_b;

 private:
  void bind();

  ModelConfig config_;
  std::vector<NamedParameter<T>> params_;
};

// Same parameter values converted to another element type.
template <typename U, typename T>
Model<U> model_cast(const Model<T>& model);

struct ForwardOptions {
  bool training = false;
  // Required when training with dropout.
  Rng* rng = nullptr;
};

// G = LReLU(conv(X; W_E1)), M = LReLU(conv(G; W_E2)) + G.
template <typename T>
Tensor<T> spatial_embed(const Tensor<T>& frames, const Model<T>& model);

// P[j,h,w,2d] = sin(j / 10000^(2d/D)), P[j,h,w,2d+1] = cos(...), j = 1..T.
template <typename T>
Tensor<T> positional_encoding(std::size_t frames, std::size_t height,
                              std::size_t width, std::size_t depth);

template <typename T>
Tensor<T> fuse_embedding(const Tensor<T>& features, const Tensor<T>& encoding);

// One pre-LN block: S = E + Drop(W_O(Attn(conv(LN1 E)))),
// out = S + Drop(conv(LReLU(conv(LN2 S)))).
template <typename T>
Tensor<T> transformer_block(const Tensor<T>& input, const BlockParams<T>& block,
                            const ModelConfig& config,
                            const ForwardOptions& options,
                            const std::string& name = "block");

// Full network on a [T,H,W,C] sequence; output index t predicts frame t+1.
// When `block_outputs` is given it receives Z_1 .. Z_N.
template <typename T>
Tensor<T> forward_teacher_forced(const Tensor<T>& frames, const Model<T>& model,
                                 const ForwardOptions& options = {},
                                 std::vector<Tensor<T>>* block_outputs = nullptr);

}  // namespace tctn

#endif  // TCTN_MODEL_HPP_
