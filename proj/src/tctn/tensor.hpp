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

#ifndef TCTN_TENSOR_HPP_
#define TCTN_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tctn/error.hpp"

namespace tctn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

class Tape;

template <typename T>
struct TensorNode {
  Shape shape;
  std::vector<T> value;
  // Empty until something writes a gradient.
  std::vector<T> grad;
  bool requires_grad = false;
  // Set when the tensor is the output of an operation recorded on a tape.
  const Tape* tape = nullptr;
  std::size_t tape_index = 0;

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
  }
};

// Shared handle to a dense row-major array. Copies alias the same storage;
// use clone() for a deep copy.
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, T value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<T> data,
                          bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->value.size(); }

  std::span<const T> data() const { return node_->value; }
  // Writing into a tensor that a live tape has recorded invalidates that
  // tape's backward pass.
  std::span<T> mutable_data() { return node_->value; }
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  std::span<const T> grad() const;
  std::span<T> mutable_grad();
  void zero_grad();

  // True when this tensor is an operation output recorded on a tape.
  bool on_tape() const { return node_->tape != nullptr; }

  // Deep copy of value (and requires_grad flag); never on a tape.
  Tensor clone() const;

  TensorNode<T>& node() const { return *node_; }
  const std::shared_ptr<TensorNode<T>>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<TensorNode<T>> node_;
};

// Ordered record of executed differentiable operations.
class Tape {
 public:
  struct Entry {
    std::string op;
    std::function<void()> clear_output_grad;
    std::function<void()> backward;
  };

  std::size_t record(Entry entry);
  std::size_t size() const { return entries_.size(); }
  const std::string& op_name(std::size_t index) const {
    return entries_.at(index).op;
  }
  void clear();

  // Entry indices visited by the most recent backward pass, in visit order.
  const std::vector<std::size_t>& last_backward_order() const {
    return last_order_;
  }

  // Reverse-mode sweep from `loss`, which must be a scalar recorded on this
  // tape. Gradients of intermediate tensors are reset first; leaf gradients
  // accumulate across calls.
  template <typename T>
  void backward(const Tensor<T>& loss);

 private:
  std::vector<Entry> entries_;
  std::vector<std::size_t> last_order_;
};

template <typename T>
void backward(const Tensor<T>& loss, Tape& tape) {
  tape.backward(loss);
}

// Makes `tape` the recording target for operations on the current thread.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

// Suspends recording on the current thread.
class NoGradScope {
 public:
  NoGradScope();
  ~NoGradScope();
  NoGradScope(const NoGradScope&) = delete;
  NoGradScope& operator=(const NoGradScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

namespace detail {

// Builds an operation result. Throws kNumeric naming `op` when the value
// holds NaN or Inf. When a tape is active and any input requires a
// gradient, the result is recorded with `backward_fn`, which receives the
// output gradient and accumulates into the inputs.
template <typename T>
Tensor<T> make_result(
    const char* op, Shape shape, std::vector<T> value,
    std::initializer_list<const Tensor<T>*> inputs,
    std::function<void(const std::vector<T>& out_grad)> backward_fn);

template <typename T>
void check_finite(const char* op, std::span<const T> values);

// True when gradients should flow into `t`.
template <typename T>
inline bool wants_grad(const Tensor<T>& t) {
  return t.defined() && t.requires_grad();
}

}  // namespace detail

// Element-wise and reduction primitives.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);

// Rows [begin, end) of the leading axis.
template <typename T>
Tensor<T> slice_leading(const Tensor<T>& a, std::size_t begin, std::size_t end);

// Concatenation along the leading axis. Not differentiable.
template <typename T>
Tensor<T> concat_leading(const Tensor<T>& a, const Tensor<T>& b);

// Element-wise clamp into [lo, hi]. Not differentiable.
template <typename T>
Tensor<T> clamp(const Tensor<T>& a, T lo, T hi);

// Same values converted to element type U. Not differentiable.
template <typename U, typename T>
Tensor<U> cast(const Tensor<T>& a) {
  std::vector<U> out(a.data().begin(), a.data().end());
  return Tensor<U>::from_data(a.shape(), std::move(out));
}

}  // namespace tctn

#endif  // TCTN_TENSOR_HPP_
