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

#ifndef TCTN_GRADCHECK_HPP_
#define TCTN_GRADCHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tctn/tensor.hpp"

namespace tctn {

struct GradCheckResult {
  // max over checked elements of |analytic - numeric| / max(1, |numeric|)
  double max_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

// Compares the tape gradient of the scalar f() with respect to `x` against
// central differences of width 2 * step. `f` must read `x` by reference and
// be deterministic; two evaluations that disagree raise kInvalidOracle.
// `indices` restricts the comparison to a subset of x's elements (empty
// means all of them).
GradCheckResult finite_diff_check(const std::function<Tensor<double>()>& f,
                                  Tensor<double>& x, double step = 1e-4,
                                  const std::vector<std::size_t>& indices = {});

struct GradSuiteEntry {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::size_t checked = 0;

  bool passed() const { return max_error < tolerance; }
};

struct GradSuiteReport {
  std::vector<GradSuiteEntry> ops;
  // Full toy-scale model, one entry per parameter group.
  std::vector<GradSuiteEntry> model;

  bool passed() const;
  double max_op_error() const;
  double max_model_error() const;
};

inline constexpr double kOpGradTolerance = 1e-4;
inline constexpr double kModelGradTolerance = 1e-3;

// Randomized finite-difference checks in double precision: every
// differentiable op on `trials` random small shapes (step 1e-4), then the
// toy-scale model on `trials` random initializations, sampling
// `model_samples` elements of every parameter group (step 1e-6).
GradSuiteReport run_gradient_suite(std::uint64_t seed, std::size_t trials,
                                   bool include_model = true,
                                   std::size_t model_samples = 3);

}  // namespace tctn

#endif  // TCTN_GRADCHECK_HPP_
