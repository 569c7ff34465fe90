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

// C interface to the TCTN library. All objects are opaque handles owned by
// the caller and released with the matching *_destroy function. Every
// fallible call returns a tctn_status; on failure tctn_last_error() holds a
// message for the calling thread.

#ifndef TCTN_TCTN_H_
#define TCTN_TCTN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TCTN_API __declspec(dllexport)
#else
#define TCTN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tctn_status {
  TCTN_OK = 0,
  TCTN_ERR_ARGUMENT = 1,
  TCTN_ERR_CONFIG = 2,
  TCTN_ERR_SHAPE = 3,
  TCTN_ERR_NUMERIC = 4,
  TCTN_ERR_FORMAT = 5,
  TCTN_ERR_LENGTH = 6,
  TCTN_ERR_IO = 7,
  TCTN_ERR_DATA = 8,
  TCTN_ERR_INVALID_STATE = 9,
  TCTN_ERR_INVALID_ORACLE = 10,
  TCTN_ERR_INTERNAL = 11,
} tctn_status;

typedef struct tctn_config tctn_config;
typedef struct tctn_dataset tctn_dataset;
typedef struct tctn_model tctn_model;
typedef struct tctn_report tctn_report;

TCTN_API const char* tctn_version(void);
TCTN_API const char* tctn_status_name(tctn_status status);
// Message of the last failed call on this thread; "" if none.
TCTN_API const char* tctn_last_error(void);

// Worker threads used by the numeric kernels (default 1).
TCTN_API tctn_status tctn_set_num_threads(int threads);

/* Run configuration: flat key = value schema. */

TCTN_API tctn_status tctn_config_create(tctn_config** out);
TCTN_API void tctn_config_destroy(tctn_config* config);
TCTN_API tctn_status tctn_config_merge_file(tctn_config* config, const char* path);
TCTN_API tctn_status tctn_config_merge_text(tctn_config* config, const char* text);
TCTN_API tctn_status tctn_config_set(tctn_config* config, const char* key,
                                     const char* value);
TCTN_API tctn_status tctn_config_validate(const tctn_config* config);
// String getters copy at most `capacity` bytes including the terminator and
// store the full length (without terminator) in *needed when non-null.
TCTN_API tctn_status tctn_config_get(const tctn_config* config, const char* key,
                                     char* buffer, size_t capacity, size_t* needed);
TCTN_API tctn_status tctn_config_dump(const tctn_config* config, char* buffer,
                                      size_t capacity, size_t* needed);

/* Datasets: frames [count, length, height, width, channels] in [0,1]. */

// Bouncing-sprite sequences of length input_frames + output_frames on a
// height x width canvas, using the data.* keys and the seed.
TCTN_API tctn_status tctn_dataset_generate(const tctn_config* config,
                                           tctn_dataset** out);
TCTN_API tctn_status tctn_dataset_load(const char* path, tctn_dataset** out);
TCTN_API tctn_status tctn_dataset_save(const tctn_dataset* dataset, const char* path);
TCTN_API void tctn_dataset_destroy(tctn_dataset* dataset);
TCTN_API tctn_status tctn_dataset_shape(const tctn_dataset* dataset, size_t dims[5]);
TCTN_API const float* tctn_dataset_frames(const tctn_dataset* dataset);
// Writes one frame as binary PGM (maxval 255), averaging channels.
TCTN_API tctn_status tctn_dataset_write_pgm(const tctn_dataset* dataset,
                                            size_t sequence, size_t frame,
                                            const char* path);
// FNV-1a 64-bit hash of a file's bytes.
TCTN_API tctn_status tctn_file_checksum(const char* path, uint64_t* out);

/* Models (float32 parameters). */

TCTN_API tctn_status tctn_model_create(const tctn_config* config, tctn_model** out);
TCTN_API tctn_status tctn_model_load(const char* path, tctn_model** out);
TCTN_API tctn_status tctn_model_save(const tctn_model* model, const char* path);
TCTN_API void tctn_model_destroy(tctn_model* model);
TCTN_API size_t tctn_model_parameter_count(const tctn_model* model);

typedef void (*tctn_train_callback)(size_t epoch, size_t step, double loss,
                                    double lr, void* user);

// Trains with the training keys of `config`, then replaces the model's
// parameters with those of the best-loss epoch. `log_path` (may be null)
// receives the epoch,step,loss,lr CSV.
TCTN_API tctn_status tctn_train(tctn_model* model, const tctn_dataset* dataset,
                                const tctn_config* config,
                                tctn_train_callback callback, void* user,
                                const char* log_path);

// Predicts output_frames frames for sequence `sequence` from its first
// input_frames frames. *out is a single-sequence dataset.
TCTN_API tctn_status tctn_predict(const tctn_model* model,
                                  const tctn_dataset* dataset, size_t sequence,
                                  tctn_dataset** out);

/* Evaluation reports. */

TCTN_API tctn_status tctn_evaluate(const tctn_model* model,
                                   const tctn_dataset* dataset, tctn_report** out);
TCTN_API void tctn_report_destroy(tctn_report* report);
TCTN_API size_t tctn_report_frames(const tctn_report* report);
// frame is 1-based; frame 0 selects the aggregate.
TCTN_API tctn_status tctn_report_metrics(const tctn_report* report, size_t frame,
                                         double* psnr, double* ssim, double* mae);
TCTN_API tctn_status tctn_report_write_csv(const tctn_report* report,
                                           const char* path);

/* Finite-difference gradient suite (ops and the toy-scale model). */

typedef void (*tctn_gradcheck_callback)(const char* name, double max_error,
                                        double tolerance, size_t checked,
                                        void* user);

// Runs gradcheck_trials random trials seeded from the config seed. *passed
// is 1 when every check is below its tolerance.
TCTN_API tctn_status tctn_gradcheck(const tctn_config* config,
                                    tctn_gradcheck_callback callback, void* user,
                                    double* max_op_error, double* max_model_error,
                                    int* passed);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // TCTN_TCTN_H_
