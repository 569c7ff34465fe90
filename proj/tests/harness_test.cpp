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
#include <fstream>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "tctn/error.hpp"
#include "tctn/harness.hpp"
#include "tctn/ops.hpp"
#include "test_util.hpp"

namespace tctn {
namespace {

using testing::TempDir;

ModelConfig tiny_config() {
  ModelConfig c = ModelConfig::toy();
  c.height = 6;
  c.width = 6;
  c.embed_dim = 6;
  return c;
}

SequenceBatch moving_data(const ModelConfig& c, std::size_t count, std::uint64_t seed) {
  GenerateOptions o;
  o.count = count;
  o.length = c.input_frames + c.output_frames;
  o.canvas = {c.height, c.width};
  o.sprites_per_sequence = 1;
  o.seed = seed;
  return generate_dataset(square_sprites(2), o);
}

// Sequences whose frame t is fill(s, t) everywhere.
SequenceBatch filled_data(std::size_t count, std::size_t length, std::size_t h,
                          std::size_t w, const std::function<float(std::size_t, std::size_t)>& fill) {
  std::vector<float> v;
  for (std::size_t s = 0; s < count; ++s)
    for (std::size_t t = 0; t < length; ++t)
      for (std::size_t p = 0; p < h * w; ++p) v.push_back(fill(s, t));
  return {Tensor<float>::from_data({count, length, h, w, 1}, std::move(v))};
}

bool bit_equal(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

TEST(CosineTest, Schedule) {
  EXPECT_DOUBLE_EQ(cosine_lr(0, 10, 1e-3, 0.0), 1e-3);
  EXPECT_NEAR(cosine_lr(5, 10, 1e-3, 0.0), 5e-4, 1e-15);
  EXPECT_NEAR(cosine_lr(10, 10, 1e-3, 1e-5), 1e-5, 1e-15);
  EXPECT_NEAR(cosine_lr(3, 12, 2.0, 1.0), 1.0 + 0.5 * (1 + std::cos(M_PI * 3 / 12)), 1e-15);
  for (std::size_t e = 1; e <= 10; ++e) {
    EXPECT_LT(cosine_lr(e, 10, 1.0, 0.0), cosine_lr(e - 1, 10, 1.0, 0.0));
  }
  EXPECT_THROW(cosine_lr(0, 0, 1.0, 0.0), Error);
}

TEST(AdamTest, MatchesHandComputation) {
  Tensor<double> p = Tensor<double>::from_data({2}, {1.0, -2.0}, true);
  std::vector<Tensor<double>> params{p};
  OptimizerState<double> state;
  const AdamConfig cfg;
  const double grads[2][2] = {{0.5, -0.1}, {0.2, 0.3}};
  double m[2] = {0, 0}, v[2] = {0, 0}, x[2] = {1.0, -2.0};
  for (int step = 1; step <= 2; ++step) {
    p.zero_grad();
    for (int j = 0; j < 2; ++j) p.mutable_grad()[j] = grads[step - 1][j];
    adam_step<double>(params, state, cfg, 0.01);
    for (int j = 0; j < 2; ++j) {
      const double g = grads[step - 1][j];
      m[j] = 0.9 * m[j] + 0.1 * g;
      v[j] = 0.999 * v[j] + 0.001 * g * g;
      const double mh = m[j] / (1 - std::pow(0.9, step));
      const double vh = v[j] / (1 - std::pow(0.999, step));
      x[j] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
      EXPECT_NEAR(p.data()[j], x[j], 1e-15);
    }
  }
  // First step moves each coordinate by about lr against its gradient sign.
  EXPECT_EQ(state.step, 2u);
}

TEST(AdamTest, MissingGradientIsAnError) {
  std::vector<Tensor<float>> params{Tensor<float>::zeros({2}, true)};
  OptimizerState<float> state;
  EXPECT_THROW(adam_step<float>(params, state, {}, 0.1), Error);
}

TEST(TeacherForcingTest, PairIsShiftedByOne) {
  std::vector<float> v(5 * 2);
  std::iota(v.begin(), v.end(), 0.0f);
  const auto seq = Tensor<float>::from_data({5, 1, 2, 1}, v);
  const auto [in, target] = teacher_forcing_pair(seq);
  EXPECT_EQ(in.dim(0), 4u);
  EXPECT_EQ(target.dim(0), 4u);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(in.data()[2 * t], 2.0f * t);
    EXPECT_EQ(target.data()[2 * t], 2.0f * (t + 1));
  }
}

// Copies each frame into one embedding channel and reads it back, so the
// output at t equals frame t plus a small positional offset.
Model<double> copy_probe(const ModelConfig& c) {
  Model<double> m(c);
  const std::size_t D = c.embed_dim, ek = c.embed_kernel, mid = ek / 2;
  m.embed_w1.mutable_data()[(mid * ek + mid) * D + (D - 2)] = 1.0;
  m.forecast_w.mutable_data()[D - 2] = 1.0;
  return m;
}

TEST(TeacherForcingTest, ProbeLossIsNearZeroOnConstantSequences) {
  const ModelConfig c = tiny_config();
  const auto probe = copy_probe(c);
  const auto data = filled_data(3, 5, c.height, c.width,
                                [](std::size_t s, std::size_t) { return 0.2f * (s + 1); });
  const std::vector<std::size_t> all{0, 1, 2};
  EXPECT_LT(batch_loss(probe, data, all, LossMode::kAllShifted), 1e-4);
}

TEST(TeacherForcingTest, ProbeLossMeasuresOneStepShift) {
  const ModelConfig c = tiny_config();
  const auto probe = copy_probe(c);
  const auto data = filled_data(1, 5, c.height, c.width,
                                [](std::size_t, std::size_t t) { return 0.1f * t; });
  const std::vector<std::size_t> one{0};
  // Output t is frame t plus the encoding channel; its target is frame t + 1.
  double want = 0.0;
  const double D = static_cast<double>(c.embed_dim);
  for (std::size_t t = 0; t < 4; ++t) {
    const double enc = std::sin((t + 1.0) / std::pow(10000.0, (D - 2) / D));
    const double err = (double(0.1f * t) + enc) - double(0.1f * (t + 1));
    want += err * err / 4;
  }
  EXPECT_NEAR(batch_loss(probe, data, one, LossMode::kAllShifted), want, 1e-9);
  double future = 0.0;
  for (std::size_t t = 2; t < 4; ++t) {
    const double enc = std::sin((t + 1.0) / std::pow(10000.0, (D - 2) / D));
    const double err = (double(0.1f * t) + enc) - double(0.1f * (t + 1));
    future += err * err / 2;
  }
  EXPECT_NEAR(batch_loss(probe, data, one, LossMode::kFutureOnly), future, 1e-9);
}

TEST(TrainTest, OneSmallStepDecreasesLoss) {
  const ModelConfig c = tiny_config();
  const auto data = moving_data(c, 4, 1);
  const std::vector<std::size_t> all{0, 1, 2, 3};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto m = Model<double>::init(c, seed);
    const double before = batch_loss(m, data, all, LossMode::kAllShifted);
    TrainConfig t;
    t.batch_size = 4;
    t.base_lr = 1e-5;
    t.epochs = 1;
    t.max_steps = 1;
    t.seed = seed;
    train(m, data, t);
    EXPECT_LT(batch_loss(m, data, all, LossMode::kAllShifted), before) << seed;
  }
}

TEST(TrainTest, DeterministicLogAndBestModel) {
  ModelConfig c = tiny_config();
  c.dropout = 0.1;
  const auto data = moving_data(c, 5, 2);
  TrainConfig t;
  t.batch_size = 2;
  t.base_lr = 1e-3;
  t.epochs = 3;
  t.seed = 4;
  auto run = [&] {
    auto m = Model<float>::init(c, 1);
    return train(m, data, t);
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.log.size(), 9u);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].loss, b.log[i].loss);
    EXPECT_EQ(a.log[i].lr, b.log[i].lr);
    EXPECT_EQ(a.log[i].step, i + 1);
  }
  EXPECT_EQ(a.log[0].lr, 1e-3);
  EXPECT_EQ(a.epoch_loss.size(), 3u);
  ASSERT_TRUE(a.best_model.has_value());
  EXPECT_EQ(a.best_loss,
            *std::min_element(a.epoch_loss.begin(), a.epoch_loss.end()));
}

TEST(TrainTest, MaxStepsStopsEarly) {
  const ModelConfig c = tiny_config();
  const auto data = moving_data(c, 6, 3);
  auto m = Model<float>::init(c, 0);
  TrainConfig t;
  t.batch_size = 2;
  t.epochs = 5;
  t.max_steps = 4;
  std::size_t seen = 0;
  const auto r = train(m, data, t, [&](const TrainLogRow&) { ++seen; });
  EXPECT_EQ(r.log.size(), 4u);
  EXPECT_EQ(seen, 4u);
}

TEST(TrainTest, RejectsWrongSequenceLength) {
  const ModelConfig c = tiny_config();
  const auto data = filled_data(2, 4, c.height, c.width,
                                [](std::size_t, std::size_t) { return 0.f; });
  auto m = Model<float>::init(c, 0);
  try {
    train(m, data, TrainConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(RolloutTest, SingleStepEqualsClampedTeacherForcedOutput) {
  const ModelConfig c = tiny_config();
  const auto m = Model<float>::init(c, 7);
  const auto data = moving_data(c, 3, 5);
  for (std::size_t s = 0; s < 3; ++s) {
    const auto ctx = slice_leading(data.sequence<float>(s), 0, c.input_frames);
    const auto pred = predict_autoregressive(m, ctx, 1);
    const auto out = forward_teacher_forced(ctx, m);
    const auto last = clamp(slice_leading(out, out.dim(0) - 1, out.dim(0)), 0.0f, 1.0f);
    EXPECT_TRUE(bit_equal(pred.data(), last.data()));
  }
}

TEST(RolloutTest, WindowGrowsWithPredictions) {
  const ModelConfig c = tiny_config();
  const auto m = Model<float>::init(c, 8);
  const auto ctx = slice_leading(moving_data(c, 1, 6).sequence<float>(0), 0, c.input_frames);
  std::vector<Tensor<float>> windows;
  const auto pred = predict_autoregressive<float>(
      m, ctx, 4, [&](std::size_t k, const Tensor<float>& w) {
        EXPECT_EQ(k, windows.size());
        windows.push_back(w.clone());
      });
  ASSERT_EQ(windows.size(), 4u);
  const std::size_t f = c.height * c.width;
  for (std::size_t k = 0; k < 4; ++k) {
    ASSERT_EQ(windows[k].dim(0), c.input_frames + k);
    const auto w = windows[k].data();
    EXPECT_TRUE(bit_equal(w.first(c.input_frames * f), ctx.data()));
    EXPECT_TRUE(bit_equal(w.subspan(c.input_frames * f), pred.data().first(k * f)));
  }
  for (float v : pred.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_THROW(predict_autoregressive(m, slice_leading(ctx, 0, 1), 2), Error);
}

TEST(EvaluateTest, PersistenceOnStaticSequencesIsPerfect) {
  const auto data = filled_data(4, 7, 12, 12, [](std::size_t s, std::size_t) {
    return 0.1f * static_cast<float>(s);
  });
  const Predictor persist = [](const Tensor<float>& ctx, std::size_t k) {
    Tensor<float> last = slice_leading(ctx, ctx.dim(0) - 1, ctx.dim(0));
    Tensor<float> out = last;
    for (std::size_t i = 1; i < k; ++i) out = concat_leading(out, last);
    return out;
  };
  const MetricReport r = evaluate(persist, data, 4, 3);
  ASSERT_EQ(r.per_frame.size(), 3u);
  for (const auto& f : r.per_frame) {
    EXPECT_EQ(f.psnr, kPsnrCap);
    EXPECT_NEAR(f.ssim, 1.0, 1e-12);
    EXPECT_EQ(f.mae, 0.0);
  }
  EXPECT_THROW(evaluate(persist, data, 4, 4), Error);
}

TEST(EvaluateTest, UntrainedModelGivesFiniteMetrics) {
  ModelConfig c = tiny_config();
  c.height = c.width = 12;
  const auto data = moving_data(c, 3, 9);
  const MetricReport r = evaluate(Model<float>::init(c, 3), data);
  ASSERT_EQ(r.per_frame.size(), c.output_frames);
  double mean_psnr = 0.0;
  for (const auto& f : r.per_frame) {
    EXPECT_TRUE(std::isfinite(f.psnr) && std::isfinite(f.ssim) && std::isfinite(f.mae));
    mean_psnr += f.psnr / r.per_frame.size();
  }
  EXPECT_NEAR(r.aggregate.psnr, mean_psnr, 1e-9);
}

TEST(TrainLogTest, CsvFormat) {
  TempDir dir("log");
  write_train_log({{0, 1, 0.5, 1e-4}, {1, 2, 0.25, 5e-5}}, dir.file("log.csv"));
  std::ifstream in(dir.file("log.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,step,loss,lr");
  std::getline(in, line);
  EXPECT_EQ(line, "0,1,0.5,0.0001");
}

}  // namespace
}  // namespace tctn
