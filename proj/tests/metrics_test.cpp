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
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "tctn/error.hpp"
#include "tctn/metrics.hpp"
#include "tctn/rng.hpp"

namespace tctn {
namespace {

std::vector<float> constant(std::size_t n, float v) { return std::vector<float>(n, v); }

// Per-pixel SSIM with one global window: exact for constant images.
double global_ssim(double mx, double my, double vx, double vy, double cxy) {
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  return ((2 * mx * my + c1) * (2 * cxy + c2)) /
         ((mx * mx + my * my + c1) * (vx + vy + c2));
}

TEST(PsnrTest, ClosedForm) {
  EXPECT_DOUBLE_EQ(psnr_from_mse(0.01), 20.0);
  EXPECT_DOUBLE_EQ(psnr_from_mse(1.0), 0.0);
  EXPECT_DOUBLE_EQ(psnr_from_mse(0.0), kPsnrCap);
  // Uniform error 0.1 gives MSE 0.01 up to float rounding.
  const auto a = constant(100, 0.2f), b = constant(100, 0.3f);
  EXPECT_NEAR(psnr(a, b), 20.0, 1e-5);
  EXPECT_THROW(psnr(a, constant(99, 0.f)), Error);
}

TEST(SsimTest, IdenticalIsOne) {
  Rng rng(1);
  std::vector<float> x(32 * 20);
  for (float& v : x) v = static_cast<float>(rng.uniform());
  EXPECT_NEAR(ssim(x, x, {32, 20, 1}), 1.0, 1e-9);
}

TEST(SsimTest, ConstantImagesMatchClosedForm) {
  const FrameShape s{16, 16, 1};
  const double want = global_ssim(0, 1, 0, 0, 0);
  EXPECT_NEAR(want, 9.999e-5, 1e-7);
  EXPECT_NEAR(ssim(constant(256, 0.f), constant(256, 1.f), s), want, 1e-12);
  EXPECT_NEAR(ssim(constant(256, 0.25f), constant(256, 0.75f), s),
              global_ssim(0.25, 0.75, 0, 0, 0), 1e-9);
}

TEST(SsimTest, SymmetricAndBounded) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> a(24 * 24), b(24 * 24);
    for (float& v : a) v = static_cast<float>(rng.uniform());
    for (float& v : b) v = static_cast<float>(rng.uniform());
    const double ab = ssim(a, b, {24, 24, 1});
    EXPECT_DOUBLE_EQ(ab, ssim(b, a, {24, 24, 1}));
    EXPECT_LE(ab, 1.0);
    EXPECT_GE(ab, -1.0);
  }
}

TEST(SsimTest, AveragesChannels) {
  const FrameShape s{12, 12, 2};
  std::vector<float> a(288), b(288);
  for (std::size_t i = 0; i < 144; ++i) {
    a[2 * i] = 0.5f;
    b[2 * i] = 0.5f;  // channel 0 identical
    a[2 * i + 1] = 0.f;
    b[2 * i + 1] = 1.f;
  }
  EXPECT_NEAR(ssim(a, b, s), 0.5 * (1.0 + global_ssim(0, 1, 0, 0, 0)), 1e-12);
}

TEST(SsimTest, RejectsTinyFrames) {
  EXPECT_THROW(ssim(constant(100, 0.f), constant(100, 0.f), {10, 10, 1}), Error);
}

TEST(MaeTest, PixelSum) {
  EXPECT_DOUBLE_EQ(mae(constant(4096, 0.f), constant(4096, 1.f)), 4096.0);
  const std::vector<float> a{0.f, 0.5f, 1.f}, b{1.f, 0.25f, 1.f};
  EXPECT_DOUBLE_EQ(mae(a, b), 1.25);
}

TEST(ReportTest, SummarizeAndCsv) {
  const std::vector<std::vector<FrameMetrics>> rows{
      {{20, 0.5, 10}, {10, 0.25, 30}},
      {{30, 0.7, 20}, {20, 0.35, 50}},
  };
  const MetricReport r = summarize(rows);
  ASSERT_EQ(r.per_frame.size(), 2u);
  EXPECT_EQ(r.sequences, 2u);
  EXPECT_DOUBLE_EQ(r.per_frame[0].psnr, 25.0);
  EXPECT_DOUBLE_EQ(r.per_frame[1].mae, 40.0);
  EXPECT_NEAR(r.aggregate.psnr, (25.0 + 15.0) / 2, 1e-9);
  EXPECT_NEAR(r.aggregate.ssim, (0.6 + 0.3) / 2, 1e-9);
  EXPECT_NEAR(r.aggregate.mae, (15.0 + 40.0) / 2, 1e-9);

  std::istringstream csv(metric_csv(r));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "frame_index,psnr,ssim,mae");
  std::getline(csv, line);
  EXPECT_EQ(line.substr(0, 5), "1,25,");
  std::getline(csv, line);
  EXPECT_EQ(line.substr(0, 2), "2,");
  std::getline(csv, line);
  EXPECT_EQ(line.substr(0, 5), "mean,");
  EXPECT_FALSE(std::getline(csv, line));
}

TEST(ReportTest, RaggedRowsRejected) {
  const std::vector<std::vector<FrameMetrics>> rows{{{1, 1, 1}}, {}};
  EXPECT_THROW(summarize(rows), Error);
}

}  // namespace
}  // namespace tctn
