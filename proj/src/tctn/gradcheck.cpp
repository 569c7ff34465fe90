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

#include "tctn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tctn {
namespace {

double evaluate(const std::function<Tensor<double>()>& f) {
  NoGradScope no_grad;
  const Tensor<double> y = f();
  require(y.numel() == 1, ErrorCode::kShape,
          "finite_diff_check: f must be scalar, got " +
              shape_string(y.shape()));
  return y.item();
}

}  // namespace

GradCheckResult finite_diff_check(const std::function<Tensor<double>()>& f,
                                  Tensor<double>& x, double step,
                                  const std::vector<std::size_t>& indices) {
  require(step > 0.0, ErrorCode::kArgument,
          "finite_diff_check: step must be positive");
  require(x.requires_grad(), ErrorCode::kArgument,
          "finite_diff_check: x must require a gradient");
  const double first = evaluate(f);
  const double second = evaluate(f);
  if (first != second) {
    fail(ErrorCode::kInvalidOracle,
         "finite_diff_check: f is not deterministic (dropout enabled?)");
  }

  Tape tape;
  Tensor<double> loss;
  {
    TapeScope scope(tape);
    loss = f();
  }
  x.zero_grad();
  std::vector<double> analytic(x.numel(), 0.0);
  // A loss that does not depend on x leaves the gradient at zero.
  if (loss.on_tape()) {
    tape.backward(loss);
    if (x.has_grad()) std::copy(x.grad().begin(), x.grad().end(), analytic.begin());
  }

  std::vector<std::size_t> order = indices;
  if (order.empty()) {
    order.resize(x.numel());
    std::iota(order.begin(), order.end(), std::size_t{0});
  }

  GradCheckResult result;
  auto values = x.mutable_data();
  for (std::size_t i : order) {
    require(i < x.numel(), ErrorCode::kArgument,
            "finite_diff_check: index out of range");
    const double saved = values[i];
    values[i] = saved + step;
    const double plus = evaluate(f);
    values[i] = saved - step;
    const double minus = evaluate(f);
    values[i] = saved;
    const double numeric = (plus - minus) / (2.0 * step);
    const double err =
        std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
    if (result.checked == 0 || err > result.max_error) {
      result.max_error = err;
      result.worst_index = i;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace tctn
