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

#include "tctn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tctn/error.hpp"

namespace tctn {
namespace {

void require_same_size(const char* op, std::span<const float> a,
                       std::span<const float> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kShape,
          std::string(op) + ": frame sizes differ (" + std::to_string(a.size()) +
              " vs " + std::to_string(b.size()) + ")");
}

std::vector<double> gaussian_taps(std::size_t n, double sigma) {
  std::vector<double> taps(n);
  const double center = static_cast<double>(n - 1) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(i) - center;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Valid-region separable filter of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& plane,
                                 std::size_t h, std::size_t w,
                                 const std::vector<double>& taps) {
  const std::size_t n = taps.size();
  const std::size_t oh = h - n + 1;
  const std::size_t ow = w - n + 1;
  std::vector<double> rows(h * ow, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += taps[i] * plane[r * w + c + i];
      rows[r * ow + c] = acc;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += taps[i] * rows[(r + i) * ow + c];
      out[r * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double mean_squared_error(std::span<const float> pred,
                          std::span<const float> truth) {
  require_same_size("mse", pred, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred[i]) - truth[i];
    total += d * d;
  }
  return total / static_cast<double>(pred.size());
}

double psnr_from_mse(double mse) {
  require(mse >= 0.0, ErrorCode::kArgument, "psnr: negative mse");
  if (mse == 0.0) return kPsnrCap;
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(std::span<const float> pred, std::span<const float> truth) {
  return psnr_from_mse(mean_squared_error(pred, truth));
}

double ssim(std::span<const float> pred, std::span<const float> truth,
            const FrameShape& shape, const SsimParams& p) {
  require_same_size("ssim", pred, truth);
  require(pred.size() == shape.size(), ErrorCode::kShape,
          "ssim: frame size does not match its shape");
  require(shape.height >= p.window && shape.width >= p.window,
          ErrorCode::kArgument,
          "ssim: frame " + std::to_string(shape.height) + "x" +
              std::to_string(shape.width) + " is smaller than the " +
              std::to_string(p.window) + "x" + std::to_string(p.window) +
              " window");
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const std::vector<double> taps = gaussian_taps(p.window, p.sigma);
  const std::size_t plane = shape.height * shape.width;

  double total = 0.0;
  for (std::size_t ch = 0; ch < shape.channels; ++ch) {
    std::vector<double> x(plane), y(plane), xx(plane), yy(plane), xy(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      x[i] = pred[i * shape.channels + ch];
      y[i] = truth[i * shape.channels + ch];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, shape.height, shape.width, taps);
    const auto my = filter_valid(y, shape.height, shape.width, taps);
    const auto exx = filter_valid(xx, shape.height, shape.width, taps);
    const auto eyy = filter_valid(yy, shape.height, shape.width, taps);
    const auto exy = filter_valid(xy, shape.height, shape.width, taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = exx[i] - mx[i] * mx[i];
      const double vy = eyy[i] - my[i] * my[i];
      const double cov = exy[i] - mx[i] * my[i];
      const double num = (2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2);
      const double den = (mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2);
      sum += num / den;
    }
    total += sum / static_cast<double>(mx.size());
  }
  return total / static_cast<double>(shape.channels);
}

double mae(std::span<const float> pred, std::span<const float> truth) {
  require_same_size("mae", pred, truth);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    total += std::abs(static_cast<double>(pred[i]) - truth[i]);
  }
  return total;
}

FrameMetrics frame_metrics(std::span<const float> pred,
                           std::span<const float> truth,
                           const FrameShape& shape) {
  return {psnr(pred, truth), ssim(pred, truth, shape), mae(pred, truth)};
}

MetricReport summarize(const std::vector<std::vector<FrameMetrics>>& rows) {
  require(!rows.empty(), ErrorCode::kArgument, "no sequences to summarize");
  const std::size_t horizon = rows.front().size();
  MetricReport report;
  report.sequences = rows.size();
  report.per_frame.assign(horizon, {});
  for (const auto& row : rows) {
    require(row.size() == horizon, ErrorCode::kArgument,
            "sequences disagree on horizon length");
    for (std::size_t k = 0; k < horizon; ++k) {
      report.per_frame[k].psnr += row[k].psnr;
      report.per_frame[k].ssim += row[k].ssim;
      report.per_frame[k].mae += row[k].mae;
    }
  }
  const double n = static_cast<double>(rows.size());
  for (auto& f : report.per_frame) {
    f.psnr /= n;
    f.ssim /= n;
    f.mae /= n;
    report.aggregate.psnr += f.psnr;
    report.aggregate.ssim += f.ssim;
    report.aggregate.mae += f.mae;
  }
  const double k = static_cast<double>(horizon);
  report.aggregate.psnr /= k;
  report.aggregate.ssim /= k;
  report.aggregate.mae /= k;
  return report;
}

std::string metric_csv(const MetricReport& report) {
  std::string out = "frame_index,psnr,ssim,mae\n";
  char line[160];
  for (std::size_t k = 0; k < report.per_frame.size(); ++k) {
    const auto& f = report.per_frame[k];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g,%.17g\n", k + 1, f.psnr,
                  f.ssim, f.mae);
    out += line;
  }
  const auto& a = report.aggregate;
  std::snprintf(line, sizeof(line), "mean,%.17g,%.17g,%.17g\n", a.psnr, a.ssim,
                a.mae);
  out += line;
  return out;
}

void write_metric_csv(const MetricReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIO,
          "cannot open '" + path + "' for writing");
  out << metric_csv(report);
  require(static_cast<bool>(out), ErrorCode::kIO,
          "write to '" + path + "' failed");
}

}  // namespace tctn
