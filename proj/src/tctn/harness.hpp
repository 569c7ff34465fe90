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

#ifndef TCTN_HARNESS_HPP_
#define TCTN_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tctn/datagen.hpp"
#include "tctn/metrics.hpp"
#include "tctn/model.hpp"

namespace tctn {

enum class LossMode {
  // Every shifted output 2..J+K is compared with its target.
  kAllShifted,
  // Only the K outputs that predict future frames.
  kFutureOnly,
};

struct TrainConfig {
  std::size_t batch_size = 8;
  double base_lr = 1e-4;
  double min_lr = 0.0;
  std::size_t epochs = 80;
  // Stops after this many optimizer steps when nonzero.
  std::size_t max_steps = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  LossMode loss = LossMode::kAllShifted;
  bool shuffle = true;
  std::uint64_t seed = 0;

  void validate() const;
};

// min_lr + (base_lr - min_lr) * (1 + cos(pi * epoch / total)) / 2
double cosine_lr(std::size_t epoch, std::size_t total, double base_lr,
                 double min_lr);

template <typename T>
struct OptimizerState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected ADAM update of every tensor in `params` from its
// gradient. A parameter without a gradient raises kInvalidState. The state
// is sized on first use.
template <typename T>
void adam_step(std::span<Tensor<T>> params, OptimizerState<T>& state,
               const AdamConfig& config, double lr);

struct TrainLogRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

template <typename T>
struct TrainResult {
  std::vector<TrainLogRow> log;
  // Mean step loss per completed epoch.
  std::vector<double> epoch_loss;
  double best_loss = 0.0;
  std::size_t best_epoch = 0;
  // Snapshot of the parameters at the end of the best epoch.
  std::optional<Model<T>> best_model;
};

// Teacher-forced pair for one [J+K, H, W, C] sequence: inputs are frames
// 0..J+K-2 and targets frames 1..J+K-1, so output t is scored against
// input frame t+1.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> teacher_forcing_pair(const Tensor<T>& sequence);

// Loss of one batch of sequences as used by train(), without recording.
template <typename T>
double batch_loss(const Model<T>& model, const SequenceBatch& data,
                  std::span<const std::size_t> indices, LossMode mode);

// Trains `model` in place with MSE, ADAM and a per-epoch cosine schedule.
// `on_step` sees every logged row as it is produced.
template <typename T>
TrainResult<T> train(Model<T>& model, const SequenceBatch& data,
                     const TrainConfig& config,
                     const std::function<void(const TrainLogRow&)>& on_step = {});

// Generates `horizon` frames one at a time. The window starts as the J
// context frames; each prediction (the last output, clamped to [0,1]) is
// appended before the next step. Dropout is off. `observer` sees the
// window passed to the forward pass at every step.
template <typename T>
Tensor<T> predict_autoregressive(const Model<T>& model, const Tensor<T>& context,
                                 std::size_t horizon,
                                 const std::function<void(std::size_t, const Tensor<T>&)>&
                                     observer = {});

// Maps J context frames [J,H,W,C] to `horizon` predicted frames.
using Predictor = std::function<Tensor<float>(const Tensor<float>& context,
                                              std::size_t horizon)>;

// Rolls out every sequence from its first J frames and scores the
// prediction against the remaining K frames.
MetricReport evaluate(const Predictor& predictor, const SequenceBatch& data,
                      std::size_t context_frames, std::size_t horizon);
MetricReport evaluate(const Model<float>& model, const SequenceBatch& data);

// Writes "epoch,step,loss,lr" rows.
void write_train_log(const std::vector<TrainLogRow>& log,
                     const std::string& path);

}  // namespace tctn

#endif  // TCTN_HARNESS_HPP_
