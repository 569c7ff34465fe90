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

#ifndef TCTN_OPS_HPP_
#define TCTN_OPS_HPP_

#include <cstddef>

#include "tctn/rng.hpp"
#include "tctn/tensor.hpp"

namespace tctn {

// Per-frame 2-D cross-correlation with zero "same" padding.
// input [T,H,W,Cin], kernel [kh,kw,Cin,Cout] (kh, kw odd), bias [Cout].
template <typename T>
Tensor<T> conv2d_same(const Tensor<T>& input, const Tensor<T>& kernel,
                      const Tensor<T>& bias);

// 3-D convolution that is causal in time: (kt - 1) zero frames are padded
// on the left only, so output frame t sees input frames t-kt+1 .. t.
// Spatial padding matches conv2d_same.
// input [T,H,W,Cin], kernel [kt,kh,kw,Cin,Cout], bias [Cout].
template <typename T>
Tensor<T> causal_conv3d(const Tensor<T>& input, const Tensor<T>& kernel,
                        const Tensor<T>& bias);

// Per-position channel map over the trailing axis.
// input [..., Din], weight [Din, Dout], bias [Dout].
template <typename T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight,
                 const Tensor<T>& bias);

// Single-head scaled dot-product attention over the time axis, computed
// independently at every spatial location, with future steps masked out.
// Q, K, V share shape [T,H,W,D]. When training with dropout_p > 0 the
// post-softmax weights are dropped (inverted scaling) using `rng`.
template <typename T>
Tensor<T> masked_temporal_attention(const Tensor<T>& q, const Tensor<T>& k,
                                    const Tensor<T>& v, double dropout_p,
                                    bool training, Rng* rng);

// Post-softmax attention weights, shape [H*W, T, T] (row t, column t').
// Masked entries are exactly zero. Not differentiable.
template <typename T>
Tensor<T> masked_attention_weights(const Tensor<T>& q, const Tensor<T>& k);

inline constexpr double kLayerNormEps = 1e-5;

// Normalizes over the trailing axis with the biased variance.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& input, const Tensor<T>& gamma,
                     const Tensor<T>& beta, double eps = kLayerNormEps);

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& input, double slope);

// Inverted dropout; identity when !training or p == 0.
template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double p, bool training, Rng* rng);

// Mean of squared differences.
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target);

}  // namespace tctn

#endif  // TCTN_OPS_HPP_
