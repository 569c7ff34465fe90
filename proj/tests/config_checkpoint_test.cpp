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

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "tctn/binary_io.hpp"
#include "tctn/checkpoint.hpp"
#include "tctn/error.hpp"
#include "tctn/run_config.hpp"
#include "test_util.hpp"

namespace tctn {
namespace {

using testing::TempDir;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidState;
}

TEST(RunConfigTest, DefaultsAreTheFullSetup) {
  const RunConfig c;
  EXPECT_EQ(c.model.input_frames, 10u);
  EXPECT_EQ(c.model.output_frames, 10u);
  EXPECT_EQ(c.model.embed_dim, 128u);
  EXPECT_EQ(c.model.blocks, 6u);
  EXPECT_EQ(c.train.batch_size, 8u);
  EXPECT_DOUBLE_EQ(c.train.base_lr, 1e-4);
  EXPECT_DOUBLE_EQ(c.model.dropout, 0.1);
  EXPECT_EQ(c.threads, 1u);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfigTest, MergeTextAndComments) {
  RunConfig c;
  c.merge_text("# comment\n  embed_dim = 16  \nloss = future # trailing\n\nseed=9\n");
  EXPECT_EQ(c.model.embed_dim, 16u);
  EXPECT_EQ(c.train.loss, LossMode::kFutureOnly);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.model.seed, 9u);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.get("loss"), "future");
}

TEST(RunConfigTest, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_EQ(code_of([&] { c.set("embed_dims", "4"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { c.set("blocks", "-1"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { c.set("lr", "fast"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { c.set("qkv_bias", "maybe"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([&] { c.set("loss", "some"); }), ErrorCode::kConfig);
  try {
    c.merge_text("blocks = 2\nnot a pair\n", "run.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { c.merge_file("/nonexistent/x.cfg"); }), ErrorCode::kIO);
}

TEST(RunConfigTest, ValidateCatchesSemanticErrors) {
  RunConfig c;
  c.set("embed_dim", "7");
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfig);
  c = {};
  c.set("count", "0");
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfig);
  c = {};
  c.set("min_lr", "1");
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfig);
}

TEST(RunConfigTest, DumpRoundTrips) {
  RunConfig c;
  c.merge_text("lr = 0.000123\nbeta1 = 0.85\ndataset = a b.tctd\nqkv_bias = false\n");
  RunConfig back;
  back.merge_text(c.dump());
  EXPECT_EQ(back.dump(), c.dump());
  EXPECT_EQ(back.model, c.model);
  EXPECT_EQ(back.train.base_lr, 0.000123);
  EXPECT_EQ(back.dataset, "a b.tctd");
  const std::string text = c.dump();
  EXPECT_EQ(RunConfig::keys().size(),
            static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
}

TEST(ModelConfigTextTest, RoundTripAndRejectsOtherKeys) {
  ModelConfig m = ModelConfig::toy();
  m.lrelu_slope = 0.2;
  EXPECT_EQ(parse_model_config(format_model_config(m)), m);
  EXPECT_EQ(code_of([] { parse_model_config("lr = 1\n"); }), ErrorCode::kFormat);
}

TEST(CheckpointTest, RoundTripIsBitExact) {
  TempDir dir("ckpt");
  ModelConfig c = ModelConfig::toy();
  c.qkv_bias = false;
  const auto m = Model<float>::init(c, 13);
  const std::string path = dir.file("m.ckpt");
  save_checkpoint(m, path);
  const auto back = load_checkpoint<float>(path);
  EXPECT_EQ(back.config(), m.config());
  ASSERT_EQ(back.parameters().size(), m.parameters().size());
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    const auto& a = m.parameters()[i];
    const auto& b = back.parameters()[i];
    EXPECT_EQ(a.name, b.name);
    EXPECT_EQ(a.tensor.shape(), b.tensor.shape());
    EXPECT_TRUE(std::equal(a.tensor.data().begin(), a.tensor.data().end(),
                           b.tensor.data().begin()));
  }
  EXPECT_EQ(encode_checkpoint(back), encode_checkpoint(m));
  const auto bytes = encode_checkpoint(m);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TCTN");
}

TEST(CheckpointTest, RejectsCorruption) {
  const auto m = Model<float>::init(ModelConfig::toy(), 1);
  const auto good = encode_checkpoint(m);
  auto bad = good;
  bad[1] = 'X';
  EXPECT_EQ(code_of([&] { decode_checkpoint<float>(bad); }), ErrorCode::kFormat);
  bad = good;
  bad[4] = 2;
  EXPECT_EQ(code_of([&] { decode_checkpoint<float>(bad); }), ErrorCode::kFormat);
  bad = good;
  bad.resize(good.size() - 3);
  EXPECT_EQ(code_of([&] { decode_checkpoint<float>(bad); }), ErrorCode::kLength);
  bad = good;
  bad.push_back(0);
  EXPECT_EQ(code_of([&] { decode_checkpoint<float>(bad); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([&] { load_checkpoint<float>("/nonexistent.ckpt"); }), ErrorCode::kIO);
}

TEST(CheckpointTest, RejectsRenamedParameter) {
  const auto m = Model<float>::init(ModelConfig::toy(), 1);
  auto bytes = encode_checkpoint(m);
  const std::string needle = "forecast.bias";
  auto it = std::search(bytes.begin(), bytes.end(), needle.begin(), needle.end());
  ASSERT_NE(it, bytes.end());
  *(it + 9) = 'X';  // "forecast.Xias"
  EXPECT_EQ(code_of([&] { decode_checkpoint<float>(bytes); }), ErrorCode::kFormat);
}

}  // namespace
}  // namespace tctn
