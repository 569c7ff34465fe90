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

#include "tctn/model.hpp"

#include <algorithm>
#include <cmath>

#include "tctn/ops.hpp"

namespace tctn {

void ModelConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kConfig, "model config: " + what);
  };
  check(input_frames >= 1, "input_frames must be >= 1");
  check(output_frames >= 1, "output_frames must be >= 1");
  check(height >= 1 && width >= 1, "height and width must be >= 1");
  check(channels >= 1, "channels must be >= 1");
  check(embed_dim >= 2 && embed_dim % 2 == 0,
        "embed_dim must be even and >= 2");
  check(blocks >= 1, "blocks must be >= 1");
  check(embed_kernel % 2 == 1, "embed_kernel must be odd");
  check(tc_kernel_t >= 1, "tc_kernel_t must be >= 1");
  check(tc_kernel_h % 2 == 1 && tc_kernel_w % 2 == 1,
        "tc_kernel_h and tc_kernel_w must be odd");
  check(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0,1)");
  check(lrelu_slope >= 0.0, "lrelu_slope must be >= 0");
}

ModelConfig ModelConfig::toy() {
  ModelConfig c;
  c.input_frames = 3;
  c.output_frames = 2;
  c.height = 8;
  c.width = 8;
  c.channels = 1;
  c.embed_dim = 8;
  c.blocks = 2;
  c.dropout = 0.0;
  return c;
}

template <typename T>
Model<T>::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  const std::size_t d = config.embed_dim;
  const std::size_t c = config.channels;
  const std::size_t ek = config.embed_kernel;
  const Shape tc{config.tc_kernel_t, config.tc_kernel_h, config.tc_kernel_w, d, d};
  auto zeros = [](Shape s) { return Tensor<T>::zeros(std::move(s), true); };
  auto ones = [](Shape s) { return Tensor<T>::full(std::move(s), T(1), true); };

  embed_w1 = zeros({ek, ek, c, d});
  embed_b1 = zeros({d});
  embed_w2 = zeros({ek, ek, d, d});
  embed_b2 = zeros({d});
  blocks.resize(config.blocks);
  for (auto& b : blocks) {
    b.ln1_gamma = ones({d});
    b.ln1_beta = zeros({d});
    b.wq = zeros(tc);
    b.wk = zeros(tc);
    b.wv = zeros(tc);
    b.bq = Tensor<T>::zeros({d}, config.qkv_bias);
    b.bk = Tensor<T>::zeros({d}, config.qkv_bias);
    b.bv = Tensor<T>::zeros({d}, config.qkv_bias);
    b.wo = zeros({d, d});
    b.bo = zeros({d});
    b.ln2_gamma = ones({d});
    b.ln2_beta = zeros({d});
    b.wf1 = zeros(tc);
    b.bf1 = zeros({d});
    b.wf2 = zeros(tc);
    b.bf2 = zeros({d});
  }
  forecast_w = zeros({d, c});
  forecast_b = zeros({c});
  bind();
}

template <typename T>
void Model<T>::bind() {
  params_.clear();
  auto add = [this](std::string name, ParamKind kind, const Tensor<T>& t) {
    params_.push_back({std::move(name), kind, t});
  };
  using K = ParamKind;
  add("embed.conv1.weight", K::kWeight, embed_w1);
  add("embed.conv1.bias", K::kBias, embed_b1);
  add("embed.conv2.weight", K::kWeight, embed_w2);
  add("embed.conv2.bias", K::kBias, embed_b2);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const std::string p = "block" + std::to_string(i) + ".";
    add(p + "ln1.gamma", K::kGamma, b.ln1_gamma);
    add(p + "ln1.beta", K::kBeta, b.ln1_beta);
    add(p + "attn.wq", K::kWeight, b.wq);
    if (config_.qkv_bias) add(p + "attn.bq", K::kBias, b.bq);
    add(p + "attn.wk", K::kWeight, b.wk);
    if (config_.qkv_bias) add(p + "attn.bk", K::kBias, b.bk);
    add(p + "attn.wv", K::kWeight, b.wv);
    if (config_.qkv_bias) add(p + "attn.bv", K::kBias, b.bv);
    add(p + "attn.wo", K::kWeight, b.wo);
    add(p + "attn.bo", K::kBias, b.bo);
    add(p + "ln2.gamma", K::kGamma, b.ln2_gamma);
    add(p + "ln2.beta", K::kBeta, b.ln2_beta);
    add(p + "ff.w1", K::kWeight, b.wf1);
    add(p + "ff.b1", K::kBias, b.bf1);
    add(p + "ff.w2", K::kWeight, b.wf2);
    add(p + "ff.b2", K::kBias, b.bf2);
  }
  add("forecast.weight", K::kWeight, forecast_w);
  add("forecast.bias", K::kBias, forecast_b);
}

template <typename T>
Model<T> Model<T>::init(const ModelConfig& config, std::uint64_t seed) {
  Model model(config);
  Rng rng(seed);
  for (auto& p : model.params_) {
    if (p.kind != ParamKind::kWeight) continue;
    const Shape& s = p.tensor.shape();
    const std::size_t fan_in = shape_numel(s) / s.back();
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (T& v : p.tensor.mutable_data()) {
      v = static_cast<T>(rng.uniform(-bound, bound));
    }
  }
  return model;
}

template <typename T>
Tensor<T>& Model<T>::parameter(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  fail(ErrorCode::kArgument, "unknown parameter '" + std::string(name) + "'");
}

template <typename T>
const Tensor<T>& Model<T>::parameter(std::string_view name) const {
  return const_cast<Model*>(this)->parameter(name);
}

template <typename T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.numel();
  return n;
}

template <typename T>
Model<T> Model<T>::clone() const {
  Model copy(config_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto src = params_[i].tensor.data();
    std::copy(src.begin(), src.end(), copy.params_[i].tensor.mutable_data().begin());
  }
  return copy;
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template <typename U, typename T>
Model<U> model_cast(const Model<T>& model) {
  Model<U> out(model.config());
  for (std::size_t i = 0; i < model.parameters().size(); ++i) {
    auto src = model.parameters()[i].tensor.data();
    Tensor<U> dst = out.parameters()[i].tensor;
    std::transform(src.begin(), src.end(), dst.mutable_data().begin(),
                   [](T v) { return static_cast<U>(v); });
  }
  return out;
}

// ---- Forward ---------------------------------------------------------------

namespace {

// Runs one sublayer, prefixing numeric failures with its name.
template <typename F>
auto sublayer(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumeric) throw;
    throw Error(ErrorCode::kNumeric, name + ": " + e.what());
  }
}

}  // namespace

template <typename T>
Tensor<T> spatial_embed(const Tensor<T>& frames, const Model<T>& model) {
  const ModelConfig& c = model.config();
  require(frames.rank() == 4 && frames.dim(3) == c.channels, ErrorCode::kShape,
          "spatial_embed: expected [T,H,W," + std::to_string(c.channels) +
              "], got " + shape_string(frames.shape()));
  return sublayer("embed", [&] {
    Tensor<T> g = leaky_relu(conv2d_same(frames, model.embed_w1, model.embed_b1),
                             c.lrelu_slope);
    Tensor<T> m = leaky_relu(conv2d_same(g, model.embed_w2, model.embed_b2),
                             c.lrelu_slope);
    return add(m, g);
  });
}

template <typename T>
Tensor<T> positional_encoding(std::size_t frames, std::size_t height,
                              std::size_t width, std::size_t depth) {
  require(depth >= 2 && depth % 2 == 0, ErrorCode::kConfig,
          "positional_encoding: depth must be even");
  std::vector<T> row(frames * depth);
  for (std::size_t t = 0; t < frames; ++t) {
    const double j = static_cast<double>(t + 1);
    for (std::size_t pair = 0; pair < depth / 2; ++pair) {
      const double freq = std::pow(
          10000.0, static_cast<double>(2 * pair) / static_cast<double>(depth));
      row[t * depth + 2 * pair] = static_cast<T>(std::sin(j / freq));
      row[t * depth + 2 * pair + 1] = static_cast<T>(std::cos(j / freq));
    }
  }
  std::vector<T> out(frames * height * width * depth);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t s = 0; s < height * width; ++s) {
      std::copy_n(row.begin() + t * depth, depth,
                  out.begin() + (t * height * width + s) * depth);
    }
  }
  return Tensor<T>::from_data({frames, height, width, depth}, std::move(out));
}

template <typename T>
Tensor<T> fuse_embedding(const Tensor<T>& features, const Tensor<T>& encoding) {
  require(features.shape() == encoding.shape(), ErrorCode::kShape,
          "fuse_embedding: shape mismatch " + shape_string(features.shape()) +
              " vs " + shape_string(encoding.shape()));
  return add(features, encoding);
}

template <typename T>
Tensor<T> transformer_block(const Tensor<T>& input, const BlockParams<T>& b,
                            const ModelConfig& c, const ForwardOptions& options,
                            const std::string& name) {
  const bool train = options.training;
  const double p = c.dropout;
  Tensor<T> s = sublayer(name + ".attention", [&] {
    Tensor<T> e_hat = layer_norm(input, b.ln1_gamma, b.ln1_beta);
    Tensor<T> q = causal_conv3d(e_hat, b.wq, b.bq);
    Tensor<T> k = causal_conv3d(e_hat, b.wk, b.bk);
    Tensor<T> v = causal_conv3d(e_hat, b.wv, b.bv);
    Tensor<T> a = masked_temporal_attention(q, k, v, p, train, options.rng);
    Tensor<T> a_hat = dropout(linear(a, b.wo, b.bo), p, train, options.rng);
    return add(input, a_hat);
  });
  return sublayer(name + ".feed_forward", [&] {
    Tensor<T> s_hat = layer_norm(s, b.ln2_gamma, b.ln2_beta);
    Tensor<T> h = leaky_relu(causal_conv3d(s_hat, b.wf1, b.bf1), c.lrelu_slope);
    Tensor<T> f = dropout(causal_conv3d(h, b.wf2, b.bf2), p, train, options.rng);
    return add(s, f);
  });
}

template <typename T>
Tensor<T> forward_teacher_forced(const Tensor<T>& frames, const Model<T>& model,
                                 const ForwardOptions& options,
                                 std::vector<Tensor<T>>* block_outputs) {
  const ModelConfig& c = model.config();
  require(frames.rank() == 4 && frames.dim(0) >= 1, ErrorCode::kShape,
          "forward: expected [T,H,W,C] with T >= 1, got " +
              shape_string(frames.shape()));
  require(frames.dim(1) == c.height && frames.dim(2) == c.width &&
              frames.dim(3) == c.channels,
          ErrorCode::kShape,
          "forward: frame shape " + shape_string(frames.shape()) +
              " does not match the model configuration");
  Tensor<T> m = spatial_embed(frames, model);
  Tensor<T> z = fuse_embedding(
      m, positional_encoding<T>(frames.dim(0), c.height, c.width, c.embed_dim));
  if (block_outputs) block_outputs->clear();
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    z = transformer_block(z, model.blocks[i], c, options,
                          "block" + std::to_string(i));
    if (block_outputs) block_outputs->push_back(z);
  }
  return sublayer("forecast",
                  [&] { return linear(z, model.forecast_w, model.forecast_b); });
}

#define TCTN_INSTANTIATE(T)                                                   \
  template class Model<T>;                                                    \
  template Tensor<T> spatial_embed(const Tensor<T>&, const Model<T>&);        \
  template Tensor<T> positional_encoding<T>(std::size_t, std::size_t,         \
                                            std::size_t, std::size_t);        \
  template Tensor<T> fuse_embedding(const Tensor<T>&, const Tensor<T>&);      \
  template Tensor<T> transformer_block(const Tensor<T>&,                      \
                                       const BlockParams<T>&,                 \
                                       const ModelConfig&,                    \
                                       const ForwardOptions&,                 \
                                       const std::string&);                   \
  template Tensor<T> forward_teacher_forced(const Tensor<T>&,                 \
                                            const Model<T>&,                  \
                                            const ForwardOptions&,            \
                                            std::vector<Tensor<T>>*);

TCTN_INSTANTIATE(float)
TCTN_INSTANTIATE(double)

#undef TCTN_INSTANTIATE

template Model<float> model_cast<float, double>(const Model<double>&);
template Model<double> model_cast<double, float>(const Model<float>&);
template Model<float> model_cast<float, float>(const Model<float>&);
template Model<double> model_cast<double, double>(const Model<double>&);

}  // namespace tctn
