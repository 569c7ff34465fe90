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

#include "tctn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tctn {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

// ---- Tensor ---------------------------------------------------------------

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), T(0), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::full(Shape shape, T value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from_data(std::move(shape), std::vector<T>(n, value), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::from_data(Shape shape, std::vector<T> data,
                               bool requires_grad) {
  for (std::size_t d : shape) {
    require(d > 0, ErrorCode::kShape,
            "tensor extents must be positive, got " + shape_string(shape));
  }
  require(shape_numel(shape) == data.size(), ErrorCode::kShape,
          "data length " + std::to_string(data.size()) +
              " does not match shape " + shape_string(shape));
  Tensor t;
  t.node_ = std::make_shared<TensorNode<T>>();
  t.node_->shape = std::move(shape);
  t.node_->value = std::move(data);
  t.node_->requires_grad = requires_grad;
  return t;
}

template <typename T>
T Tensor<T>::item() const {
  require(numel() == 1, ErrorCode::kShape,
          "item() needs a single-element tensor, got " + shape_string(shape()));
  return node_->value[0];
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  require(has_grad(), ErrorCode::kInvalidState, "tensor has no gradient");
  return node_->grad;
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  node_->ensure_grad();
  return node_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (has_grad()) std::fill(node_->grad.begin(), node_->grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  return from_data(shape(), node_->value, requires_grad());
}

// ---- Tape -----------------------------------------------------------------

namespace {
thread_local Tape* t_active_tape = nullptr;
}  // namespace

Tape* active_tape() { return t_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(t_active_tape) {
  t_active_tape = &tape;
}
TapeScope::~TapeScope() { t_active_tape = previous_; }

NoGradScope::NoGradScope() : previous_(t_active_tape) {
  t_active_tape = nullptr;
}
NoGradScope::~NoGradScope() { t_active_tape = previous_; }

std::size_t Tape::record(Entry entry) {
  entries_.push_back(std::move(entry));
  return entries_.size() - 1;
}

void Tape::clear() {
  entries_.clear();
  last_order_.clear();
}

template <typename T>
void Tape::backward(const Tensor<T>& loss) {
  require(loss.defined(), ErrorCode::kArgument, "backward on empty tensor");
  require(loss.numel() == 1, ErrorCode::kShape,
          "backward needs a scalar loss, got shape " +
              shape_string(loss.shape()));
  require(loss.node().tape == this && loss.node().tape_index < entries_.size(),
          ErrorCode::kInvalidState, "loss was not recorded on this tape");
  const std::size_t last = loss.node().tape_index;
  for (std::size_t i = 0; i <= last; ++i) entries_[i].clear_output_grad();
  auto& node = loss.node();
  node.ensure_grad();
  node.grad[0] = T(1);
  last_order_.clear();
  for (std::size_t i = last + 1; i-- > 0;) {
    last_order_.push_back(i);
    entries_[i].backward();
  }
}

// ---- Recording ------------------------------------------------------------

namespace detail {

template <typename T>
void check_finite(const char* op, std::span<const T> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      fail(ErrorCode::kNumeric, std::string(op) +
                                    ": non-finite value at flat index " +
                                    std::to_string(i));
    }
  }
}

template <typename T>
Tensor<T> make_result(
    const char* op, Shape shape, std::vector<T> value,
    std::initializer_list<const Tensor<T>*> inputs,
    std::function<void(const std::vector<T>& out_grad)> backward_fn) {
  check_finite<T>(op, value);
  Tensor<T> out = Tensor<T>::from_data(std::move(shape), std::move(value));
  Tape* tape = active_tape();
  if (tape == nullptr || !backward_fn) return out;
  bool any = false;
  for (const Tensor<T>* in : inputs) any = any || wants_grad(*in);
  if (!any) return out;

  auto node = out.node_ptr();
  node->requires_grad = true;
  node->tape = tape;
  std::weak_ptr<TensorNode<T>> weak = node;
  Tape::Entry entry;
  entry.op = op;
  entry.clear_output_grad = [weak] {
    if (auto n = weak.lock()) n->grad.clear();
  };
  // The entry keeps the output alive so its gradient survives until replay.
  entry.backward = [node, fn = std::move(backward_fn)] {
    if (node->grad.empty()) return;
    fn(node->grad);
  };
  node->tape_index = tape->record(std::move(entry));
  return out;
}

}  // namespace detail

// ---- Primitives -----------------------------------------------------------

namespace {

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a,
                        const Tensor<T>& b) {
  require(a.shape() == b.shape(), ErrorCode::kShape,
          std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
              " vs " + shape_string(b.shape()));
}

template <typename T>
void accumulate(const std::shared_ptr<TensorNode<T>>& node,
                const std::vector<T>& delta, T factor = T(1)) {
  if (!node->requires_grad) return;
  node->ensure_grad();
  for (std::size_t i = 0; i < delta.size(); ++i) node->grad[i] += factor * delta[i];
}

}  // namespace

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  auto na = a.node_ptr();
  auto nb = b.node_ptr();
  return detail::make_result<T>("add", a.shape(), std::move(out), {&a, &b},
                                [na, nb](const std::vector<T>& g) {
                                  accumulate(na, g);
                                  accumulate(nb, g);
                                });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  auto na = a.node_ptr();
  auto nb = b.node_ptr();
  return detail::make_result<T>("sub", a.shape(), std::move(out), {&a, &b},
                                [na, nb](const std::vector<T>& g) {
                                  accumulate(na, g);
                                  accumulate(nb, g, T(-1));
                                });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  auto na = a.node_ptr();
  auto nb = b.node_ptr();
  return detail::make_result<T>(
      "mul", a.shape(), std::move(out), {&a, &b},
      [na, nb](const std::vector<T>& g) {
        // z = x * y; dx = dz * y; dy = dz * x
        if (na->requires_grad) {
          na->ensure_grad();
          for (std::size_t i = 0; i < g.size(); ++i) na->grad[i] += g[i] * nb->value[i];
        }
        if (nb->requires_grad) {
          nb->ensure_grad();
          for (std::size_t i = 0; i < g.size(); ++i) nb->grad[i] += g[i] * na->value[i];
        }
      });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (T& v : out) v *= factor;
  auto na = a.node_ptr();
  return detail::make_result<T>(
      "scale", a.shape(), std::move(out), {&a},
      [na, factor](const std::vector<T>& g) { accumulate(na, g, factor); });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  double total = 0.0;
  for (T v : a.data()) total += v;
  auto na = a.node_ptr();
  return detail::make_result<T>(
      "sum", Shape{1}, std::vector<T>{static_cast<T>(total)}, {&a},
      [na](const std::vector<T>& g) {
        if (!na->requires_grad) return;
        na->ensure_grad();
        for (T& v : na->grad) v += g[0];
      });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  double total = 0.0;
  for (T v : a.data()) total += v;
  const T inv = T(1) / static_cast<T>(a.numel());
  auto na = a.node_ptr();
  return detail::make_result<T>(
      "mean", Shape{1},
      std::vector<T>{static_cast<T>(total / static_cast<double>(a.numel()))},
      {&a}, [na, inv](const std::vector<T>& g) {
        if (!na->requires_grad) return;
        na->ensure_grad();
        for (T& v : na->grad) v += g[0] * inv;
      });
}

template <typename T>
Tensor<T> slice_leading(const Tensor<T>& a, std::size_t begin,
                        std::size_t end) {
  require(a.rank() >= 1 && begin < end && end <= a.dim(0), ErrorCode::kShape,
          "slice_leading: range [" + std::to_string(begin) + "," +
              std::to_string(end) + ") invalid for shape " +
              shape_string(a.shape()));
  const std::size_t row = a.numel() / a.dim(0);
  Shape shape = a.shape();
  shape[0] = end - begin;
  std::vector<T> out(a.data().begin() + begin * row,
                     a.data().begin() + end * row);
  auto na = a.node_ptr();
  return detail::make_result<T>(
      "slice_leading", std::move(shape), std::move(out), {&a},
      [na, begin, row](const std::vector<T>& g) {
        if (!na->requires_grad) return;
        na->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) na->grad[begin * row + i] += g[i];
      });
}

template <typename T>
Tensor<T> concat_leading(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.rank() >= 1 && a.rank() == b.rank(), ErrorCode::kShape,
          "concat_leading: rank mismatch");
  for (std::size_t i = 1; i < a.rank(); ++i) {
    require(a.dim(i) == b.dim(i), ErrorCode::kShape,
            "concat_leading: shape mismatch " + shape_string(a.shape()) +
                " vs " + shape_string(b.shape()));
  }
  Shape shape = a.shape();
  shape[0] += b.dim(0);
  std::vector<T> out(a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  return Tensor<T>::from_data(std::move(shape), std::move(out));
}

template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (T& v : out) v = std::clamp(v, lo, hi);
  return Tensor<T>::from_data(a.shape(), std::move(out));
}

#define TCTN_INSTANTIATE(T)                                                  \
  template class Tensor<T>;                                                  \
  template void Tape::backward<T>(const Tensor<T>&);                         \
  template void detail::check_finite<T>(const char*, std::span<const T>);    \
  template Tensor<T> detail::make_result<T>(                                 \
      const char*, Shape, std::vector<T>,                                    \
      std::initializer_list<const Tensor<T>*>,                               \
      std::function<void(const std::vector<T>&)>);                           \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> scale(const Tensor<T>&, T);                             \
  template Tensor<T> sum(const Tensor<T>&);                                  \
  template Tensor<T> mean(const Tensor<T>&);                                 \
  template Tensor<T> slice_leading(const Tensor<T>&, std::size_t,            \
                                   std::size_t);                             \
  template Tensor<T> concat_leading(const Tensor<T>&, const Tensor<T>&);     \
  template Tensor<T> clamp(const Tensor<T>&, T, T);

TCTN_INSTANTIATE(float)
TCTN_INSTANTIATE(double)

#undef TCTN_INSTANTIATE

}  // namespace tctn
