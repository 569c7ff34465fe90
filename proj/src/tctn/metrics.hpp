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

#ifndef TCTN_METRICS_HPP_
#define TCTN_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tctn {

struct FrameShape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;

  std::size_t size() const { return height * width * channels; }
};

// Returned for identical frames.
inline constexpr double kPsnrCap = 100.0;

struct SsimParams {
  std::size_t window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

double mean_squared_error(std::span<const float> pred,
                          std::span<const float> truth);

// 10 log10(1 / mse) for peak 1.0; kPsnrCap when mse == 0.
double psnr_from_mse(double mse);
double psnr(std::span<const float> pred, std::span<const float> truth);

// Mean SSIM over all fully contained windows, averaged over channels.
double ssim(std::span<const float> pred, std::span<const float> truth,
            const FrameShape& shape, const SsimParams& params = {});

// Sum of absolute pixel differences over the frame.
double mae(std::span<const float> pred, std::span<const float> truth);

struct FrameMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
  double mae = 0.0;
};

FrameMetrics frame_metrics(std::span<const float> pred,
                           std::span<const float> truth,
                           const FrameShape& shape);

struct MetricReport {
  // Index k holds the mean over sequences at horizon step k + 1.
  std::vector<FrameMetrics> per_frame;
  // Mean of per_frame, i.e. the mean over every frame of every sequence.
  FrameMetrics aggregate;
  std::size_t sequences = 0;
};

// Builds a report from per-sequence rows: rows[s][k] is sequence s at
// horizon step k + 1.
MetricReport summarize(const std::vector<std::vector<FrameMetrics>>& rows);

// CSV with header "frame_index,psnr,ssim,mae", one row per horizon step
// (1-based) and a final row labeled "mean".
std::string metric_csv(const MetricReport& report);
void write_metric_csv(const MetricReport& report, const std::string& path);

}  // namespace tctn

#endif  // TCTN_METRICS_HPP_
