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

#include "tctn/tctn.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "tctn/binary_io.hpp"
#include "tctn/checkpoint.hpp"
#include "tctn/datagen.hpp"
#include "tctn/error.hpp"
#include "tctn/gradcheck.hpp"
#include "tctn/harness.hpp"
#include "tctn/parallel.hpp"
#include "tctn/run_config.hpp"

struct tctn_config {
  tctn::RunConfig run;
};

struct tctn_dataset {
  tctn::SequenceBatch batch;
};

struct tctn_model {
  tctn::Model<float> model;
};

struct tctn_report {
  tctn::MetricReport report;
};

namespace {

thread_local std::string t_last_error;

tctn_status to_status(tctn::ErrorCode code) {
  using tctn::ErrorCode;
  switch (code) {
    case ErrorCode::kArgument: return TCTN_ERR_ARGUMENT;
    case ErrorCode::kConfig: return TCTN_ERR_CONFIG;
    case ErrorCode::kShape: return TCTN_ERR_SHAPE;
    case ErrorCode::kNumeric: return TCTN_ERR_NUMERIC;
    case ErrorCode::kFormat: return TCTN_ERR_FORMAT;
    case ErrorCode::kLength: return TCTN_ERR_LENGTH;
    case ErrorCode::kIO: return TCTN_ERR_IO;
    case ErrorCode::kData: return TCTN_ERR_DATA;
    case ErrorCode::kInvalidState: return TCTN_ERR_INVALID_STATE;
    case ErrorCode::kInvalidOracle: return TCTN_ERR_INVALID_ORACLE;
  }
  return TCTN_ERR_INTERNAL;
}

// Runs body, translating exceptions into a status and the thread's message.
template <typename F>
tctn_status guarded(F&& body) {
  try {
    body();
    t_last_error.clear();
    return TCTN_OK;
  } catch (const tctn::Error& e) {
    t_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return TCTN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return TCTN_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return TCTN_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  tctn::require(p != nullptr, tctn::ErrorCode::kArgument,
                std::string(what) + " must not be null");
}

void copy_out(const std::string& s, char* buffer, std::size_t capacity,
              std::size_t* needed) {
  if (needed) *needed = s.size();
  if (buffer && capacity > 0) {
    const std::size_t n = std::min(capacity - 1, s.size());
    std::memcpy(buffer, s.data(), n);
    buffer[n] = '\0';
  }
}

}  // namespace

extern "C" {

const char* tctn_version(void) { return "1.0.0"; }

const char* tctn_status_name(tctn_status status) {
  switch (status) {
    case TCTN_OK: return "ok";
    case TCTN_ERR_ARGUMENT: return "argument";
    case TCTN_ERR_CONFIG: return "config";
    case TCTN_ERR_SHAPE: return "shape";
    case TCTN_ERR_NUMERIC: return "numeric";
    case TCTN_ERR_FORMAT: return "format";
    case TCTN_ERR_LENGTH: return "length";
    case TCTN_ERR_IO: return "io";
    case TCTN_ERR_DATA: return "data";
    case TCTN_ERR_INVALID_STATE: return "invalid_state";
    case TCTN_ERR_INVALID_ORACLE: return "invalid_oracle";
    case TCTN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* tctn_last_error(void) { return t_last_error.c_str(); }

tctn_status tctn_set_num_threads(int threads) {
  return guarded([&] { tctn::set_num_threads(threads); });
}

tctn_status tctn_config_create(tctn_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tctn_config{};
  });
}

void tctn_config_destroy(tctn_config* config) { delete config; }

tctn_status tctn_config_merge_file(tctn_config* config, const char* path) {
  return guarded([&] {
    need(config, "config");
    need(path, "path");
    config->run.merge_file(path);
  });
}

tctn_status tctn_config_merge_text(tctn_config* config, const char* text) {
  return guarded([&] {
    need(config, "config");
    need(text, "text");
    config->run.merge_text(text);
  });
}

tctn_status tctn_config_set(tctn_config* config, const char* key,
                            const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->run.set(key, value);
  });
}

tctn_status tctn_config_validate(const tctn_config* config) {
  return guarded([&] {
    need(config, "config");
    config->run.validate();
  });
}

tctn_status tctn_config_get(const tctn_config* config, const char* key,
                            char* buffer, size_t capacity, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    copy_out(config->run.get(key), buffer, capacity, needed);
  });
}

tctn_status tctn_config_dump(const tctn_config* config, char* buffer,
                             size_t capacity, size_t* needed) {
  return guarded([&] {
    need(config, "config");
    copy_out(config->run.dump(), buffer, capacity, needed);
  });
}

tctn_status tctn_dataset_generate(const tctn_config* config, tctn_dataset** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    const tctn::RunConfig& run = config->run;
    run.validate();
    tctn::require(run.model.channels == 1, tctn::ErrorCode::kConfig,
                  "datagen produces single-channel frames; set channels = 1");
    const auto sprites = run.data.idx_path.empty()
                             ? tctn::square_sprites(run.data.sprite_size)
                             : tctn::load_idx(run.data.idx_path);
    tctn::GenerateOptions options;
    options.count = run.data.count;
    options.length = run.model.input_frames + run.model.output_frames;
    options.canvas = {run.model.height, run.model.width};
    options.sprites_per_sequence = run.data.sprites_per_sequence;
    options.seed = run.seed;
    auto batch = tctn::generate_dataset(sprites, options);
    *out = new tctn_dataset{std::move(batch)};
  });
}

tctn_status tctn_dataset_load(const char* path, tctn_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tctn_dataset{tctn::load_dataset(path)};
  });
}

tctn_status tctn_dataset_save(const tctn_dataset* dataset, const char* path) {
  return guarded([&] {
    need(dataset, "dataset");
    need(path, "path");
    tctn::save_dataset(dataset->batch, path);
  });
}

void tctn_dataset_destroy(tctn_dataset* dataset) { delete dataset; }

tctn_status tctn_dataset_shape(const tctn_dataset* dataset, size_t dims[5]) {
  return guarded([&] {
    need(dataset, "dataset");
    need(dims, "dims");
    for (std::size_t i = 0; i < 5; ++i) dims[i] = dataset->batch.frames.dim(i);
  });
}

const float* tctn_dataset_frames(const tctn_dataset* dataset) {
  return dataset ? dataset->batch.frames.data().data() : nullptr;
}

tctn_status tctn_dataset_write_pgm(const tctn_dataset* dataset, size_t sequence,
                                   size_t frame, const char* path) {
  return guarded([&] {
    need(dataset, "dataset");
    need(path, "path");
    const tctn::SequenceBatch& b = dataset->batch;
    tctn::require(sequence < b.count() && frame < b.length(),
                  tctn::ErrorCode::kArgument,
                  "write_pgm: sequence/frame index out of range");
    const std::size_t h = b.height(), w = b.width(), c = b.channels();
    const float* src = b.frames.data().data() +
                       ((sequence * b.length() + frame) * h * w * c);
    const std::string header =
        "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    for (std::size_t p = 0; p < h * w; ++p) {
      double v = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) v += src[p * c + ch];
      v = std::clamp(v / static_cast<double>(c), 0.0, 1.0);
      bytes.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
    tctn::io::write_file(path, bytes);
  });
}

tctn_status tctn_file_checksum(const char* path, uint64_t* out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = tctn::file_checksum(path);
  });
}

tctn_status tctn_model_create(const tctn_config* config, tctn_model** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    config->run.validate();
    *out = new tctn_model{tctn::Model<float>::init(config->run.model)};
  });
}

tctn_status tctn_model_load(const char* path, tctn_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tctn_model{tctn::load_checkpoint<float>(path)};
  });
}

tctn_status tctn_model_save(const tctn_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    tctn::save_checkpoint(model->model, path);
  });
}

void tctn_model_destroy(tctn_model* model) { delete model; }

size_t tctn_model_parameter_count(const tctn_model* model) {
  return model ? model->model.parameter_count() : 0;
}

tctn_status tctn_train(tctn_model* model, const tctn_dataset* dataset,
                       const tctn_config* config, tctn_train_callback callback,
                       void* user, const char* log_path) {
  return guarded([&] {
    need(model, "model");
    need(dataset, "dataset");
    need(config, "config");
    std::function<void(const tctn::TrainLogRow&)> on_step;
    if (callback) {
      on_step = [&](const tctn::TrainLogRow& r) {
        callback(r.epoch, r.step, r.loss, r.lr, user);
      };
    }
    auto result = tctn::train(model->model, dataset->batch, config->run.train, on_step);
    if (log_path) tctn::write_train_log(result.log, log_path);
    if (result.best_model) model->model = std::move(*result.best_model);
  });
}

tctn_status tctn_predict(const tctn_model* model, const tctn_dataset* dataset,
                         size_t sequence, tctn_dataset** out) {
  return guarded([&] {
    need(model, "model");
    need(dataset, "dataset");
    need(out, "out");
    const tctn::SequenceBatch& b = dataset->batch;
    const tctn::ModelConfig& c = model->model.config();
    tctn::require(sequence < b.count(), tctn::ErrorCode::kArgument,
                  "predict: sequence index " + std::to_string(sequence) +
                      " out of range (dataset holds " + std::to_string(b.count()) + ")");
    tctn::require(b.length() >= c.input_frames && b.height() == c.height &&
                      b.width() == c.width && b.channels() == c.channels,
                  tctn::ErrorCode::kData,
                  "predict: dataset frames do not match the model configuration");
    const tctn::Tensor<float> seq = b.sequence<float>(sequence);
    const tctn::Tensor<float> context = tctn::slice_leading(seq, 0, c.input_frames);
    const tctn::Tensor<float> pred =
        tctn::predict_autoregressive(model->model, context, c.output_frames);
    tctn::Shape shape = pred.shape();
    shape.insert(shape.begin(), 1);
    std::vector<float> values(pred.data().begin(), pred.data().end());
    *out = new tctn_dataset{
        {tctn::Tensor<float>::from_data(std::move(shape), std::move(values))}};
  });
}

tctn_status tctn_evaluate(const tctn_model* model, const tctn_dataset* dataset,
                          tctn_report** out) {
  return guarded([&] {
    need(model, "model");
    need(dataset, "dataset");
    need(out, "out");
    *out = new tctn_report{tctn::evaluate(model->model, dataset->batch)};
  });
}

void tctn_report_destroy(tctn_report* report) { delete report; }

size_t tctn_report_frames(const tctn_report* report) {
  return report ? report->report.per_frame.size() : 0;
}

tctn_status tctn_report_metrics(const tctn_report* report, size_t frame,
                                double* psnr, double* ssim, double* mae) {
  return guarded([&] {
    need(report, "report");
    const auto& r = report->report;
    tctn::require(frame <= r.per_frame.size(), tctn::ErrorCode::kArgument,
                  "report: frame index out of range");
    const tctn::FrameMetrics& m = frame == 0 ? r.aggregate : r.per_frame[frame - 1];
    if (psnr) *psnr = m.psnr;
    if (ssim) *ssim = m.ssim;
    if (mae) *mae = m.mae;
  });
}

tctn_status tctn_report_write_csv(const tctn_report* report, const char* path) {
  return guarded([&] {
    need(report, "report");
    need(path, "path");
    tctn::write_metric_csv(report->report, path);
  });
}

tctn_status tctn_gradcheck(const tctn_config* config,
                           tctn_gradcheck_callback callback, void* user,
                           double* max_op_error, double* max_model_error,
                           int* passed) {
  return guarded([&] {
    need(config, "config");
    const auto report =
        tctn::run_gradient_suite(config->run.seed, config->run.gradcheck_trials);
    if (callback) {
      for (const auto* group : {&report.ops, &report.model}) {
        for (const auto& e : *group) {
          callback(e.name.c_str(), e.max_error, e.tolerance, e.checked, user);
        }
      }
    }
    if (max_op_error) *max_op_error = report.max_op_error();
    if (max_model_error) *max_model_error = report.max_model_error();
    if (passed) *passed = report.passed() ? 1 : 0;
  });
}

}  // extern "C"
