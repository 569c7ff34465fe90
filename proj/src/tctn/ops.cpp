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

#include "tctn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tctn/parallel.hpp"

namespace tctn {
namespace {

template <typename T>
void add_into(const std::shared_ptr<TensorNode<T>>& node,
              const std::vector<T>& delta) {
  if (!node->requires_grad) return;
  node->ensure_grad();
  for (std::size_t i = 0; i < delta.size(); ++i) node->grad[i] += delta[i];
}

// Extents of one causal convolution. Spatial padding is (k - 1) / 2 on each
// side; temporal padding is (kt - 1) on the left.
struct ConvGeometry {
  std::size_t frames, height, width, cin, cout, kt, kh, kw;

  std::size_t ph() const { return (kh - 1) / 2; }
  std::size_t pw() const { return (kw - 1) / 2; }
  std::size_t taps() const { return kt * kh * kw; }
  std::size_t in_index(std::size_t t, std::size_t h, std::size_t w) const {
    return ((t * height + h) * width + w) * cin;
  }
  std::size_t out_index(std::size_t t, std::size_t h, std::size_t w) const {
    return ((t * height + h) * width + w) * cout;
  }
};

template <typename T>
std::vector<T> conv_forward(const ConvGeometry& g, const T* in, const T* ker,
                            const T* bias) {
  std::vector<T> out(g.frames * g.height * g.width * g.cout);
  const long ph = static_cast<long>(g.ph());
  const long pw = static_cast<long>(g.pw());
  const long lag = static_cast<long>(g.kt) - 1;
  parallel_for(g.frames * g.height, [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      const std::size_t t = row / g.height;
      const std::size_t h = row % g.height;
      for (std::size_t w = 0; w < g.width; ++w) {
        T* o = out.data() + g.out_index(t, h, w);
        std::copy(bias, bias + g.cout, o);
        for (std::size_t dt = 0; dt < g.kt; ++dt) {
          const long ti = static_cast<long>(t + dt) - lag;
          if (ti < 0) continue;
          for (std::size_t dh = 0; dh < g.kh; ++dh) {
            const long hi = static_cast<long>(h + dh) - ph;
            if (hi < 0 || hi >= static_cast<long>(g.height)) continue;
            for (std::size_t dw = 0; dw < g.kw; ++dw) {
              const long wi = static_cast<long>(w + dw) - pw;
              if (wi < 0 || wi >= static_cast<long>(g.width)) continue;
              const T* x = in + g.in_index(ti, hi, wi);
              const T* k = ker + ((dt * g.kh + dh) * g.kw + dw) * g.cin * g.cout;
              for (std::size_t ci = 0; ci < g.cin; ++ci) {
                const T xv = x[ci];
                const T* kr = k + ci * g.cout;
                for (std::size_t co = 0; co < g.cout; ++co) o[co] += xv * kr[co];
              }
            }
          }
        }
      }
    }
  });
  return out;
}

// Gradient w.r.t. the input, gathered per input position so every element
// is written by exactly one worker.
template <typename T>
std::vector<T> conv_grad_input(const ConvGeometry& g, const T* ker,
                               const T* gout) {
  const std::size_t taps = g.taps();
  std::vector<T> kt(taps * g.cout * g.cin);
  for (std::size_t tap = 0; tap < taps; ++tap) {
    for (std::size_t ci = 0; ci < g.cin; ++ci) {
      for (std::size_t co = 0; co < g.cout; ++co) {
        kt[(tap * g.cout + co) * g.cin + ci] =
            ker[(tap * g.cin + ci) * g.cout + co];
      }
    }
  }
  std::vector<T> gin(g.frames * g.height * g.width * g.cin, T(0));
  const long ph = static_cast<long>(g.ph());
  const long pw = static_cast<long>(g.pw());
  parallel_for(g.frames * g.height, [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      const std::size_t ti = row / g.height;
      const std::size_t hi = row % g.height;
      for (std::size_t wi = 0; wi < g.width; ++wi) {
        T* gi = gin.data() + g.in_index(ti, hi, wi);
        for (std::size_t dt = 0; dt < g.kt; ++dt) {
          const std::size_t t = ti + (g.kt - 1) - dt;
          if (t >= g.frames) continue;
          for (std::size_t dh = 0; dh < g.kh; ++dh) {
            const long h = static_cast<long>(hi) + ph - static_cast<long>(dh);
            if (h < 0 || h >= static_cast<long>(g.height)) continue;
            for (std::size_t dw = 0; dw < g.kw; ++dw) {
              const long w = static_cast<long>(wi) + pw - static_cast<long>(dw);
              if (w < 0 || w >= static_cast<long>(g.width)) continue;
              const T* go = gout + g.out_index(t, h, w);
              const T* k = kt.data() + ((dt * g.kh + dh) * g.kw + dw) * g.cout * g.cin;
              for (std::size_t co = 0; co < g.cout; ++co) {
                const T gv = go[co];
                const T* kr = k + co * g.cin;
                for (std::size_t ci = 0; ci < g.cin; ++ci) gi[ci] += gv * kr[ci];
              }
            }
          }
        }
      }
    }
  });
  return gin;
}

// Gradient w.r.t. the kernel. Each tap is owned by one worker.
template <typename T>
std::vector<T> conv_grad_kernel(const ConvGeometry& g, const T* in,
                                const T* gout) {
  std::vector<T> gk(g.taps() * g.cin * g.cout, T(0));
  const long ph = static_cast<long>(g.ph());
  const long pw = static_cast<long>(g.pw());
  const long lag = static_cast<long>(g.kt) - 1;
  parallel_for(g.taps(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t tap = begin; tap < end; ++tap) {
      const std::size_t dt = tap / (g.kh * g.kw);
      const std::size_t dh = (tap / g.kw) % g.kh;
      const std::size_t dw = tap % g.kw;
      T* k = gk.data() + tap * g.cin * g.cout;
      for (std::size_t t = 0; t < g.frames; ++t) {
        const long ti = static_cast<long>(t + dt) - lag;
        if (ti < 0) continue;
        for (std::size_t h = 0; h < g.height; ++h) {
          const long hi = static_cast<long>(h + dh) - ph;
          if (hi < 0 || hi >= static_cast<long>(g.height)) continue;
          for (std::size_t w = 0; w < g.width; ++w) {
            const long wi = static_cast<long>(w + dw) - pw;
            if (wi < 0 || wi >= static_cast<long>(g.width)) continue;
            const T* x = in + g.in_index(ti, hi, wi);
            const T* go = gout + g.out_index(t, h, w);
            for (std::size_t ci = 0; ci < g.cin; ++ci) {
              const T xv = x[ci];
              T* kr = k + ci * g.cout;
              for (std::size_t co = 0; co < g.cout; ++co) kr[co] += xv * go[co];
            }
          }
        }
      }
    }
  });
  return gk;
}

template <typename T>
Tensor<T> conv_op(const char* op, const Tensor<T>& input,
                  const Tensor<T>& kernel, const Tensor<T>& bias,
                  const ConvGeometry& g, Shape out_shape) {
  require(bias.rank() == 1 && bias.dim(0) == g.cout, ErrorCode::kShape,
          std::string(op) + ": bias shape " + shape_string(bias.shape()) +
              " does not match " + std::to_string(g.cout) + " output channels");
  std::vector<T> out = conv_forward(g, input.data().data(),
                                    kernel.data().data(), bias.data().data());
  auto ni = input.node_ptr();
  auto nk = kernel.node_ptr();
  auto nb = bias.node_ptr();
  return detail::make_result<T>(
      op, std::move(out_shape), std::move(out), {&input, &kernel, &bias},
      [g, ni, nk, nb](const std::vector<T>& gout) {
        if (ni->requires_grad) {
          add_into(ni, conv_grad_input(g, nk->value.data(), gout.data()));
        }
        if (nk->requires_grad) {
          add_into(nk, conv_grad_kernel(g, ni->value.data(), gout.data()));
        }
        if (nb->requires_grad) {
          nb->ensure_grad();
          for (std::size_t i = 0; i < gout.size(); i += g.cout) {
            for (std::size_t co = 0; co < g.cout; ++co) nb->grad[co] += gout[i + co];
          }
        }
      });
}

}  // namespace

template <typename T>
Tensor<T> conv2d_same(const Tensor<T>& input, const Tensor<T>& kernel,
                      const Tensor<T>& bias) {
  require(input.rank() == 4, ErrorCode::kShape,
          "conv2d_same: input must be [T,H,W,C], got " +
              shape_string(input.shape()));
  require(kernel.rank() == 4, ErrorCode::kShape,
          "conv2d_same: kernel must be [kh,kw,Cin,Cout], got " +
              shape_string(kernel.shape()));
  require(kernel.dim(0) % 2 == 1 && kernel.dim(1) % 2 == 1, ErrorCode::kShape,
          "conv2d_same: spatial kernel extents must be odd");
  require(kernel.dim(2) == input.dim(3), ErrorCode::kShape,
          "conv2d_same: input has " + std::to_string(input.dim(3)) +
              " channels, kernel expects " + std::to_string(kernel.dim(2)));
  const ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3),
                       kernel.dim(3), 1, kernel.dim(0), kernel.dim(1)};
  Shape out{g.frames, g.height, g.width, g.cout};
  return conv_op("conv2d_same", input, kernel, bias, g, std::move(out));
}

template <typename T>
Tensor<T> causal_conv3d(const Tensor<T>& input, const Tensor<T>& kernel,
                        const Tensor<T>& bias) {
  require(input.rank() == 4, ErrorCode::kShape,
          "causal_conv3d: input must be [T,H,W,C], got " +
              shape_string(input.shape()));
  require(kernel.rank() == 5, ErrorCode::kShape,
          "causal_conv3d: kernel must be [kt,kh,kw,Cin,Cout], got " +
              shape_string(kernel.shape()));
  require(kernel.dim(1) % 2 == 1 && kernel.dim(2) % 2 == 1, ErrorCode::kShape,
          "causal_conv3d: spatial kernel extents must be odd");
  require(kernel.dim(3) == input.dim(3), ErrorCode::kShape,
          "causal_conv3d: input has " + std::to_string(input.dim(3)) +
              " channels, kernel expects " + std::to_string(kernel.dim(3)));
  const ConvGeometry g{input.dim(0), input.dim(1),  input.dim(2),
                       input.dim(3), kernel.dim(4), kernel.dim(0),
                       kernel.dim(1), kernel.dim(2)};
  Shape out{g.frames, g.height, g.width, g.cout};
  return conv_op("causal_conv3d", input, kernel, bias, g, std::move(out));
}

template <typename T>
Tensor<T> linear(const Tensor<T>& input, const Tensor<T>& weight,
                 const Tensor<T>& bias) {
  require(weight.rank() == 2, ErrorCode::kShape,
          "linear: weight must be [Din,Dout], got " +
              shape_string(weight.shape()));
  require(input.dim(input.rank() - 1) == weight.dim(0), ErrorCode::kShape,
          "linear: input has " + std::to_string(input.dim(input.rank() - 1)) +
              " channels, weight expects " + std::to_string(weight.dim(0)));
  const std::size_t rows = input.numel() / weight.dim(0);
  const ConvGeometry g{rows, 1, 1, weight.dim(0), weight.dim(1), 1, 1, 1};
  Shape out = input.shape();
  out.back() = weight.dim(1);
  return conv_op("linear", input, weight, bias, g, std::move(out));
}

// ---- Attention -------------------------------------------------------------

namespace {

struct AttentionGeometry {
  std::size_t frames, sites, depth;
  std::size_t at(std::size_t t, std::size_t s) const {
    return (t * sites + s) * depth;
  }
  std::size_t weight(std::size_t s, std::size_t t, std::size_t u) const {
    return (s * frames + t) * frames + u;
  }
};

template <typename T>
AttentionGeometry attention_geometry(const char* op, const Tensor<T>& q,
                                     const Tensor<T>& k, const Tensor<T>& v) {
  require(q.rank() == 4, ErrorCode::kShape,
          std::string(op) + ": Q must be [T,H,W,D], got " +
              shape_string(q.shape()));
  require(q.shape() == k.shape() && q.shape() == v.shape(), ErrorCode::kShape,
          std::string(op) + ": Q, K, V shapes differ");
  require(q.dim(3) > 0, ErrorCode::kConfig, std::string(op) + ": D must be > 0");
  return {q.dim(0), q.dim(1) * q.dim(2), q.dim(3)};
}

// Softmax over visible steps u <= t at every site; masked entries stay 0.
template <typename T>
std::vector<T> softmax_weights(const AttentionGeometry& g, const T* q,
                               const T* k) {
  std::vector<T> probs(g.sites * g.frames * g.frames, T(0));
  const T inv_sqrt = static_cast<T>(1.0 / std::sqrt(static_cast<double>(g.depth)));
  parallel_for(g.sites, [&](std::size_t begin, std::size_t end) {
    std::vector<T> scores(g.frames);
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t t = 0; t < g.frames; ++t) {
        const T* qt = q + g.at(t, s);
        T row_max = -std::numeric_limits<T>::infinity();
        for (std::size_t u = 0; u <= t; ++u) {
          const T* ku = k + g.at(u, s);
          T dot = T(0);
          for (std::size_t d = 0; d < g.depth; ++d) dot += qt[d] * ku[d];
          scores[u] = dot * inv_sqrt;
          if (!std::isfinite(scores[u])) {
            fail(ErrorCode::kNumeric,
                 "masked_temporal_attention: non-finite score at t=" +
                     std::to_string(t));
          }
          row_max = std::max(row_max, scores[u]);
        }
        T total = T(0);
        for (std::size_t u = 0; u <= t; ++u) {
          scores[u] = std::exp(scores[u] - row_max);
          total += scores[u];
        }
        T* row = probs.data() + g.weight(s, t, 0);
        for (std::size_t u = 0; u <= t; ++u) row[u] = scores[u] / total;
      }
    }
  });
  return probs;
}

}  // namespace

template <typename T>
Tensor<T> masked_attention_weights(const Tensor<T>& q, const Tensor<T>& k) {
  const AttentionGeometry g =
      attention_geometry("masked_attention_weights", q, k, k);
  return Tensor<T>::from_data({g.sites, g.frames, g.frames},
                              softmax_weights(g, q.data().data(), k.data().data()));
}

template <typename T>
Tensor<T> masked_temporal_attention(const Tensor<T>& q, const Tensor<T>& k,
                                    const Tensor<T>& v, double dropout_p,
                                    bool training, Rng* rng) {
  const AttentionGeometry g =
      attention_geometry("masked_temporal_attention", q, k, v);
  require(dropout_p >= 0.0 && dropout_p < 1.0, ErrorCode::kConfig,
          "masked_temporal_attention: dropout probability must be in [0,1)");
  const bool drop = training && dropout_p > 0.0;
  require(!drop || rng != nullptr, ErrorCode::kArgument,
          "masked_temporal_attention: dropout needs a generator");

  std::vector<T> probs = softmax_weights(g, q.data().data(), k.data().data());
  // Dropout multipliers are drawn serially so the stream is independent of
  // the thread count.
  std::vector<T> keep;
  if (drop) {
    keep.assign(probs.size(), T(0));
    const T survivor = static_cast<T>(1.0 / (1.0 - dropout_p));
    for (std::size_t s = 0; s < g.sites; ++s) {
      for (std::size_t t = 0; t < g.frames; ++t) {
        for (std::size_t u = 0; u <= t; ++u) {
          keep[g.weight(s, t, u)] = rng->uniform() < dropout_p ? T(0) : survivor;
        }
      }
    }
  }

  std::vector<T> out(q.numel(), T(0));
  const T* vv = v.data().data();
  parallel_for(g.sites, [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t t = 0; t < g.frames; ++t) {
        T* o = out.data() + g.at(t, s);
        for (std::size_t u = 0; u <= t; ++u) {
          T w = probs[g.weight(s, t, u)];
          if (drop) w *= keep[g.weight(s, t, u)];
          const T* vu = vv + g.at(u, s);
          for (std::size_t d = 0; d < g.depth; ++d) o[d] += w * vu[d];
        }
      }
    }
  });

  auto nq = q.node_ptr();
  auto nk = k.node_ptr();
  auto nv = v.node_ptr();
  return detail::make_result<T>(
      "masked_temporal_attention", q.shape(), std::move(out), {&q, &k, &v},
      [g, nq, nk, nv, probs = std::move(probs), keep = std::move(keep),
       drop](const std::vector<T>& gout) {
        const T inv_sqrt =
            static_cast<T>(1.0 / std::sqrt(static_cast<double>(g.depth)));
        std::vector<T> dq(gout.size(), T(0));
        std::vector<T> dk(gout.size(), T(0));
        std::vector<T> dv(gout.size(), T(0));
        const T* qv = nq->value.data();
        const T* kv = nk->value.data();
        const T* vv = nv->value.data();
        parallel_for(g.sites, [&](std::size_t begin, std::size_t end) {
          std::vector<T> dw(g.frames);
          std::vector<T> ds(g.frames);
          for (std::size_t s = begin; s < end; ++s) {
            for (std::size_t t = 0; t < g.frames; ++t) {
              const T* ga = gout.data() + g.at(t, s);
              T row_dot = T(0);
              for (std::size_t u = 0; u <= t; ++u) {
                const std::size_t wi = g.weight(s, t, u);
                const T mult = drop ? keep[wi] : T(1);
                const T* vu = vv + g.at(u, s);
                T* dvu = dv.data() + g.at(u, s);
                const T w = probs[wi] * mult;
                T dot = T(0);
                for (std::size_t d = 0; d < g.depth; ++d) {
                  dvu[d] += w * ga[d];
                  dot += ga[d] * vu[d];
                }
                dw[u] = dot * mult;
                row_dot += dw[u] * probs[wi];
              }
              T* dqt = dq.data() + g.at(t, s);
              const T* qt = qv + g.at(t, s);
              for (std::size_t u = 0; u <= t; ++u) {
                ds[u] = probs[g.weight(s, t, u)] * (dw[u] - row_dot) * inv_sqrt;
                const T* ku = kv + g.at(u, s);
                T* dku = dk.data() + g.at(u, s);
                for (std::size_t d = 0; d < g.depth; ++d) {
                  dqt[d] += ds[u] * ku[d];
                  dku[d] += ds[u] * qt[d];
                }
              }
            }
          }
        });
        add_into(nq, dq);
        add_into(nk, dk);
        add_into(nv, dv);
      });
}

// ---- Normalization and activations ------------------------------------------

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& input, const Tensor<T>& gamma,
                     const Tensor<T>& beta, double eps) {
  const std::size_t depth = input.dim(input.rank() - 1);
  require(depth > 0, ErrorCode::kConfig, "layer_norm: D must be > 0");
  require(gamma.rank() == 1 && gamma.dim(0) == depth && beta.rank() == 1 &&
              beta.dim(0) == depth,
          ErrorCode::kShape,
          "layer_norm: gamma/beta must be [" + std::to_string(depth) + "]");
  const std::size_t rows = input.numel() / depth;
  std::vector<T> normed(input.numel());
  std::vector<T> inv_std(rows);
  std::vector<T> out(input.numel());
  const T* x = input.data().data();
  const T* ga = gamma.data().data();
  const T* be = beta.data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const T* xr = x + r * depth;
    double mu = 0.0;
    for (std::size_t d = 0; d < depth; ++d) mu += xr[d];
    mu /= static_cast<double>(depth);
    double var = 0.0;
    for (std::size_t d = 0; d < depth; ++d) {
      const double c = xr[d] - mu;
      var += c * c;
    }
    var /= static_cast<double>(depth);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[r] = static_cast<T>(inv);
    for (std::size_t d = 0; d < depth; ++d) {
      const T n = static_cast<T>((xr[d] - mu) * inv);
      normed[r * depth + d] = n;
      out[r * depth + d] = n * ga[d] + be[d];
    }
  }
  auto ni = input.node_ptr();
  auto ng = gamma.node_ptr();
  auto nb = beta.node_ptr();
  return detail::make_result<T>(
      "layer_norm", input.shape(), std::move(out), {&input, &gamma, &beta},
      [depth, rows, ni, ng, nb, normed = std::move(normed),
       inv_std = std::move(inv_std)](const std::vector<T>& gout) {
        if (ng->requires_grad) ng->ensure_grad();
        if (nb->requires_grad) nb->ensure_grad();
        if (ni->requires_grad) ni->ensure_grad();
        const T* ga = ng->value.data();
        for (std::size_t r = 0; r < rows; ++r) {
          const T* gy = gout.data() + r * depth;
          const T* n = normed.data() + r * depth;
          double mean_dn = 0.0;
          double mean_dn_n = 0.0;
          for (std::size_t d = 0; d < depth; ++d) {
            if (ng->requires_grad) ng->grad[d] += gy[d] * n[d];
            if (nb->requires_grad) nb->grad[d] += gy[d];
            const double dn = static_cast<double>(gy[d]) * ga[d];
            mean_dn += dn;
            mean_dn_n += dn * n[d];
          }
          if (!ni->requires_grad) continue;
          mean_dn /= static_cast<double>(depth);
          mean_dn_n /= static_cast<double>(depth);
          T* gx = ni->grad.data() + r * depth;
          for (std::size_t d = 0; d < depth; ++d) {
            const double dn = static_cast<double>(gy[d]) * ga[d];
            gx[d] += static_cast<T>(inv_std[r] * (dn - mean_dn - n[d] * mean_dn_n));
          }
        }
      });
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& input, double slope) {
  require(slope >= 0.0, ErrorCode::kArgument, "leaky_relu: slope must be >= 0");
  const T a = static_cast<T>(slope);
  std::vector<T> out(input.data().begin(), input.data().end());
  for (T& v : out) {
    if (v < T(0)) v *= a;
  }
  auto ni = input.node_ptr();
  return detail::make_result<T>(
      "leaky_relu", input.shape(), std::move(out), {&input},
      [ni, a](const std::vector<T>& gout) {
        if (!ni->requires_grad) return;
        ni->ensure_grad();
        for (std::size_t i = 0; i < gout.size(); ++i) {
          ni->grad[i] += ni->value[i] >= T(0) ? gout[i] : a * gout[i];
        }
      });
}

template <typename T>
Tensor<T> dropout(const Tensor<T>& input, double p, bool training, Rng* rng) {
  require(p >= 0.0 && p < 1.0, ErrorCode::kConfig,
          "dropout: probability must be in [0,1), got " + std::to_string(p));
  if (!training || p == 0.0) return input;
  require(rng != nullptr, ErrorCode::kArgument, "dropout: missing generator");
  const T survivor = static_cast<T>(1.0 / (1.0 - p));
  std::vector<T> mask(input.numel());
  for (T& m : mask) m = rng->uniform() < p ? T(0) : survivor;
  std::vector<T> out(input.data().begin(), input.data().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  auto ni = input.node_ptr();
  return detail::make_result<T>(
      "dropout", input.shape(), std::move(out), {&input},
      [ni, mask = std::move(mask)](const std::vector<T>& gout) {
        if (!ni->requires_grad) return;
        ni->ensure_grad();
        for (std::size_t i = 0; i < gout.size(); ++i) ni->grad[i] += gout[i] * mask[i];
      });
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  require(pred.shape() == target.shape(), ErrorCode::kShape,
          "mse_loss: shape mismatch " + shape_string(pred.shape()) + " vs " +
              shape_string(target.shape()));
  const std::size_t n = pred.numel();
  double total = 0.0;
  auto p = pred.data();
  auto t = target.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(p[i]) - t[i];
    total += d * d;
  }
  auto np = pred.node_ptr();
  auto nt = target.node_ptr();
  return detail::make_result<T>(
      "mse_loss", Shape{1},
      std::vector<T>{static_cast<T>(total / static_cast<double>(n))},
      {&pred, &target}, [np, nt, n](const std::vector<T>& gout) {
        const T factor = static_cast<T>(2.0 / static_cast<double>(n)) * gout[0];
        if (np->requires_grad) np->ensure_grad();
        if (nt->requires_grad) nt->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          const T d = factor * (np->value[i] - nt->value[i]);
          if (np->requires_grad) np->grad[i] += d;
          if (nt->requires_grad) nt->grad[i] -= d;
        }
      });
}

#define TCTN_INSTANTIATE(T)                                                    \
  template Tensor<T> conv2d_same(const Tensor<T>&, const Tensor<T>&,           \
                                 const Tensor<T>&);                            \
  template Tensor<T> causal_conv3d(const Tensor<T>&, const Tensor<T>&,         \
                                   const Tensor<T>&);                          \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&,                \
                            const Tensor<T>&);                                 \
  template Tensor<T> masked_temporal_attention(                                \
      const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double, bool,      \
      Rng*);                                                                   \
  template Tensor<T> masked_attention_weights(const Tensor<T>&,                \
                                              const Tensor<T>&);               \
  template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>&, double);                     \
  template Tensor<T> leaky_relu(const Tensor<T>&, double);                     \
  template Tensor<T> dropout(const Tensor<T>&, double, bool, Rng*);            \
  template Tensor<T> mse_loss(const Tensor<T>&, const Tensor<T>&);

TCTN_INSTANTIATE(float)
TCTN_INSTANTIATE(double)

#undef TCTN_INSTANTIATE

}  // namespace tctn
