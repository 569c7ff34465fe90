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

#include <cmath>
#include <limits>

#include "gtest/gtest.h"
#include "tctn/error.hpp"
#include "tctn/gradcheck.hpp"
#include "tctn/tensor.hpp"
#include "test_util.hpp"

namespace tctn {
namespace {

using testing::random_tensor;
using TensorD = Tensor<double>;

TEST(TensorTest, FromDataRejectsBadShapes) {
  try {
    TensorD::from_data({2, 3}, std::vector<double>(5));
    FAIL() << "expected a shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  EXPECT_THROW(TensorD::zeros({2, 0}), Error);
  EXPECT_EQ(TensorD::zeros({2, 3}).numel(), 6u);
}

TEST(TensorTest, ItemNeedsScalar) {
  EXPECT_DOUBLE_EQ(TensorD::full({1}, 4.5).item(), 4.5);
  EXPECT_THROW(TensorD::zeros({2}).item(), Error);
}

TEST(TensorTest, CloneIsDeepAndOffTape) {
  TensorD a = TensorD::full({3}, 1.0, true);
  TensorD b = a.clone();
  b.mutable_data()[0] = 7.0;
  EXPECT_DOUBLE_EQ(a.data()[0], 1.0);
  EXPECT_TRUE(b.requires_grad());
  EXPECT_FALSE(b.on_tape());
}

TEST(TapeTest, RecordsOnlyWhenActiveAndNeeded) {
  TensorD a = TensorD::full({2}, 1.0, true);
  TensorD c = TensorD::full({2}, 2.0);
  Tape tape;
  {
    TapeScope scope(tape);
    add(c, c);  // no input requires grad
    EXPECT_EQ(tape.size(), 0u);
    add(a, c);
    EXPECT_EQ(tape.size(), 1u);
    {
      NoGradScope off;
      add(a, c);
    }
    EXPECT_EQ(tape.size(), 1u);
  }
  add(a, c);  // no active tape
  EXPECT_EQ(tape.size(), 1u);
  EXPECT_EQ(active_tape(), nullptr);
}

TEST(TapeTest, ProductRuleAndReverseOrder) {
  // z = sum(x * y); dx = y, dy = x
  TensorD x = TensorD::from_data({3}, {1, 2, 3}, true);
  TensorD y = TensorD::from_data({3}, {4, 5, 6}, true);
  Tape tape;
  TensorD z;
  {
    TapeScope scope(tape);
    z = sum(mul(x, y));
  }
  backward(z, tape);
  EXPECT_DOUBLE_EQ(z.item(), 32.0);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(x.grad()[i], y.data()[i]);
    EXPECT_DOUBLE_EQ(y.grad()[i], x.data()[i]);
  }
  ASSERT_EQ(tape.last_backward_order().size(), 2u);
  EXPECT_EQ(tape.last_backward_order()[0], 1u);
  EXPECT_EQ(tape.last_backward_order()[1], 0u);
  EXPECT_EQ(tape.op_name(0), "mul");
}

TEST(TapeTest, LeafGradientsAccumulateAcrossBackwardCalls) {
  Rng rng(3);
  TensorD x = random_tensor(rng, {4}, true);
  Tape tape;
  TensorD loss;
  {
    TapeScope scope(tape);
    loss = sum(mul(x, x));
  }
  tape.backward(loss);
  const std::vector<double> once(x.grad().begin(), x.grad().end());
  tape.backward(loss);
  for (std::size_t i = 0; i < once.size(); ++i) {
    EXPECT_EQ(x.grad()[i], 2.0 * once[i]);
  }
  x.zero_grad();
  tape.backward(loss);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(x.grad()[i], once[i]);
}

TEST(TapeTest, SharedSubexpressionSumsBothPaths) {
  // y = x + x; d/dx sum(y * y) = 8 x
  TensorD x = TensorD::from_data({2}, {0.5, -1.5}, true);
  Tape tape;
  TensorD loss;
  {
    TapeScope scope(tape);
    TensorD y = add(x, x);
    loss = sum(mul(y, y));
  }
  tape.backward(loss);
  EXPECT_DOUBLE_EQ(x.grad()[0], 4.0);
  EXPECT_DOUBLE_EQ(x.grad()[1], -12.0);
}

TEST(TapeTest, BackwardRejectsNonScalarAndForeignLoss) {
  TensorD x = TensorD::full({2}, 1.0, true);
  Tape tape, other;
  TensorD y, s;
  {
    TapeScope scope(tape);
    y = scale(x, 2.0);
    s = sum(y);
  }
  try {
    tape.backward(y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  try {
    other.backward(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidState);
  }
}

TEST(TapeTest, GradOfUntouchedTensorIsAnError) {
  TensorD x = TensorD::full({2}, 1.0, true);
  EXPECT_FALSE(x.has_grad());
  EXPECT_THROW(x.grad(), Error);
}

TEST(TensorTest, NonFiniteResultNamesOp) {
  TensorD big = TensorD::full({1}, std::numeric_limits<double>::max());
  try {
    mul(big, big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumeric);
    EXPECT_NE(std::string(e.what()).find("mul"), std::string::npos);
  }
}

TEST(TensorTest, SliceAndConcatLeading) {
  TensorD a = TensorD::from_data({3, 2}, {0, 1, 2, 3, 4, 5});
  TensorD s = slice_leading(a, 1, 3);
  EXPECT_EQ(s.shape(), (Shape{2, 2}));
  EXPECT_DOUBLE_EQ(s.data()[0], 2.0);
  TensorD c = concat_leading(a, s);
  EXPECT_EQ(c.shape(), (Shape{5, 2}));
  EXPECT_DOUBLE_EQ(c.data()[9], 5.0);
  EXPECT_THROW(slice_leading(a, 2, 2), Error);
  TensorD k = clamp(TensorD::from_data({3}, {-1, 0.5, 2}), 0.0, 1.0);
  EXPECT_DOUBLE_EQ(k.data()[0], 0.0);
  EXPECT_DOUBLE_EQ(k.data()[1], 0.5);
  EXPECT_DOUBLE_EQ(k.data()[2], 1.0);
}

TEST(GradCheckTest, PrimitivesMatchFiniteDifferences) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    TensorD a = random_tensor(rng, {3, 2}, true);
    TensorD b = random_tensor(rng, {3, 2}, true);
    auto f = [&] {
      TensorD y = mul(sub(a, b), add(a, scale(b, 0.5)));
      return add(mean(y), sum(slice_leading(y, 1, 3)));
    };
    EXPECT_LT(finite_diff_check(f, a).max_error, 1e-4);
    EXPECT_LT(finite_diff_check(f, b).max_error, 1e-4);
  }
}

TEST(GradCheckTest, DetectsWrongGradient) {
  // clamp is not differentiable, so the tape sees no path to x.
  TensorD x = TensorD::from_data({2}, {0.3, 0.6}, true);
  auto f = [&] { return sum(mul(x, add(x, clamp(x, 0.0, 1.0)))); };
  EXPECT_GT(finite_diff_check(f, x).max_error, 0.1);
}

TEST(GradCheckTest, NondeterministicOracleIsRejected) {
  TensorD x = TensorD::full({1}, 1.0, true);
  int calls = 0;
  auto f = [&] { return scale(sum(x), static_cast<double>(++calls)); };
  try {
    finite_diff_check(f, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidOracle);
  }
}

}  // namespace
}  // namespace tctn
