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

#include "tctn/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>

#include "tctn/ops.hpp"
#include "tctn/parallel.hpp"

namespace tctn {

void TrainConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    require(ok, ErrorCode::kConfig, "train config: " + what);
  };
  check(batch_size >= 1, "batch_size must be >= 1");
  check(base_lr > 0.0, "lr must be positive");
  check(min_lr >= 0.0 && min_lr <= base_lr, "min_lr must be in [0, lr]");
  check(epochs >= 1, "epochs must be >= 1");
  check(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
        "betas must be in [0,1)");
  check(adam_eps > 0.0, "adam_eps must be positive");
}

double cosine_lr(std::size_t epoch, std::size_t total, double base_lr,
                 double min_lr) {
  require(total > 0, ErrorCode::kArgument, "cosine_lr: total epochs must be > 0");
  require(epoch <= total, ErrorCode::kArgument,
          "cosine_lr: epoch beyond the schedule");
  const double phase = std::numbers::pi * static_cast<double>(epoch) /
                       static_cast<double>(total);
  return min_lr + (base_lr - min_lr) * (1.0 + std::cos(phase)) / 2.0;
}

template <typename T>
void adam_step(std::span<Tensor<T>> params, OptimizerState<T>& state,
               const AdamConfig& config, double lr) {
  if (state.first_moment.size() != params.size()) {
    require(state.step == 0, ErrorCode::kInvalidState,
            "adam_step: optimizer state does not match the parameter list");
    state.first_moment.clear();
    state.second_moment.clear();
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.numel(), 0.0);
      state.second_moment.emplace_back(p.numel(), 0.0);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].has_grad(), ErrorCode::kInvalidState,
            "adam_step: parameter " + std::to_string(i) + " has no gradient");
    require(state.first_moment[i].size() == params[i].numel(),
            ErrorCode::kInvalidState, "adam_step: moment shape mismatch");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(config.beta1, t);
  const double correct2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto value = params[i].mutable_data();
    auto grad = params[i].grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double g = grad[j];
      m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g;
      v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g * g;
      const double m_hat = m[j] / correct1;
      const double v_hat = v[j] / correct2;
      value[j] = static_cast<T>(value[j] - lr * m_hat / (std::sqrt(v_hat) + config.eps));
    }
  }
}

template <typename T>
std::pair<Tensor<T>, Tensor<T>> teacher_forcing_pair(const Tensor<T>& sequence) {
  require(sequence.rank() == 4 && sequence.dim(0) >= 2, ErrorCode::kData,
          "teacher forcing needs at least two frames, got " +
              shape_string(sequence.shape()));
  const std::size_t length = sequence.dim(0);
  return {slice_leading(sequence, 0, length - 1),
          slice_leading(sequence, 1, length)};
}

namespace {

void check_dataset(const SequenceBatch& data, const ModelConfig& c) {
  require(data.frames.defined() && data.count() >= 1, ErrorCode::kArgument,
          "dataset is empty");
  require(data.length() == c.input_frames + c.output_frames, ErrorCode::kData,
          "dataset sequences have " + std::to_string(data.length()) +
              " frames, model expects J+K = " +
              std::to_string(c.input_frames + c.output_frames));
  require(data.height() == c.height && data.width() == c.width &&
              data.channels() == c.channels,
          ErrorCode::kData,
          "dataset frames " + shape_string(data.frames.shape()) +
              " do not match the model's " + std::to_string(c.height) + "x" +
              std::to_string(c.width) + "x" + std::to_string(c.channels));
}

// Scaled loss of one sequence, recorded on the active tape if any.
template <typename T>
Tensor<T> sequence_loss(const Model<T>& model, const Tensor<T>& sequence,
                        LossMode mode, const ForwardOptions& options,
                        double weight) {
  auto [inputs, targets] = teacher_forcing_pair(sequence);
  Tensor<T> out = forward_teacher_forced(inputs, model, options);
  if (mode == LossMode::kFutureOnly) {
    const std::size_t first = model.config().input_frames - 1;
    out = slice_leading(out, first, out.dim(0));
    targets = slice_leading(targets, first, targets.dim(0));
  }
  return scale(mse_loss(out, targets), static_cast<T>(weight));
}

}  // namespace

template <typename T>
double batch_loss(const Model<T>& model, const SequenceBatch& data,
                  std::span<const std::size_t> indices, LossMode mode) {
  check_dataset(data, model.config());
  require(!indices.empty(), ErrorCode::kArgument, "empty batch");
  NoGradScope no_grad;
  double total = 0.0;
  const double weight = 1.0 / static_cast<double>(indices.size());
  for (std::size_t i : indices) {
    total += sequence_loss(model, data.sequence<T>(i), mode, {}, weight).item();
  }
  return total;
}

template <typename T>
TrainResult<T> train(Model<T>& model, const SequenceBatch& data,
                     const TrainConfig& config,
                     const std::function<void(const TrainLogRow&)>& on_step) {
  config.validate();
  check_dataset(data, model.config());
  Rng shuffle_rng = Rng::derive(config.seed, 0x5eed0001);
  Rng dropout_rng = Rng::derive(config.seed, 0x5eed0002);
  ForwardOptions options{true, &dropout_rng};
  const AdamConfig adam{config.beta1, config.beta2, config.adam_eps};

  std::vector<Tensor<T>> params;
  for (const auto& p : model.parameters()) params.push_back(p.tensor);
  OptimizerState<T> state;

  std::vector<std::size_t> order(data.count());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult<T> result;
  std::size_t step = 0;
  auto done = [&] { return config.max_steps != 0 && step >= config.max_steps; };
  for (std::size_t epoch = 0; epoch < config.epochs && !done(); ++epoch) {
    const double lr = cosine_lr(epoch, config.epochs, config.base_lr, config.min_lr);
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);
      }
    }
    double epoch_total = 0.0;
    std::size_t epoch_steps = 0;
    for (std::size_t begin = 0; begin < order.size() && !done();
         begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - begin);
      model.zero_grad();
      double loss = 0.0;
      // Gradients of the batch mean accumulate sequence by sequence.
      for (std::size_t i = begin; i < end; ++i) {
        Tape tape;
        Tensor<T> l;
        {
          TapeScope scope(tape);
          l = sequence_loss(model, data.sequence<T>(order[i]), config.loss,
                            options, weight);
        }
        loss += l.item();
        tape.backward(l);
      }
      adam_step<T>(params, state, adam, lr);
      ++step;
      const TrainLogRow row{epoch, step, loss, lr};
      result.log.push_back(row);
      if (on_step) on_step(row);
      epoch_total += loss;
      ++epoch_steps;
    }
    if (epoch_steps == 0) break;
    const double mean = epoch_total / static_cast<double>(epoch_steps);
    result.epoch_loss.push_back(mean);
    if (!result.best_model || mean < result.best_loss) {
      result.best_loss = mean;
      result.best_epoch = epoch;
      result.best_model = model.clone();
    }
  }
  return result;
}

template <typename T>
Tensor<T> predict_autoregressive(
    const Model<T>& model, const Tensor<T>& context, std::size_t horizon,
    const std::function<void(std::size_t, const Tensor<T>&)>& observer) {
  const ModelConfig& c = model.config();
  require(context.rank() == 4 && context.dim(0) == c.input_frames,
          ErrorCode::kArgument,
          "predict: context must hold J = " + std::to_string(c.input_frames) +
              " frames, got shape " + shape_string(context.shape()));
  require(horizon >= 1, ErrorCode::kArgument, "predict: horizon must be >= 1");
  NoGradScope no_grad;
  Tensor<T> window = context;
  Tensor<T> predictions;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (observer) observer(k, window);
    const Tensor<T> out = forward_teacher_forced(window, model);
    const std::size_t last = out.dim(0) - 1;
    Tensor<T> next = clamp(slice_leading(out, last, last + 1), T(0), T(1));
    predictions = k == 0 ? next : concat_leading(predictions, next);
    window = concat_leading(window, next);
  }
  return predictions;
}

MetricReport evaluate(const Predictor& predictor, const SequenceBatch& data,
                      std::size_t context_frames, std::size_t horizon) {
  require(data.frames.defined() && data.count() >= 1, ErrorCode::kArgument,
          "evaluate: dataset is empty");
  require(data.length() == context_frames + horizon, ErrorCode::kData,
          "evaluate: sequences have " + std::to_string(data.length()) +
              " frames, expected J+K = " +
              std::to_string(context_frames + horizon));
  const FrameShape shape{data.height(), data.width(), data.channels()};
  std::vector<std::vector<FrameMetrics>> rows(data.count());
  parallel_for(data.count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const Tensor<float> sequence = data.sequence<float>(s);
      const Tensor<float> context = slice_leading(sequence, 0, context_frames);
      const Tensor<float> pred = predictor(context, horizon);
      require(pred.rank() == 4 && pred.dim(0) == horizon &&
                  pred.numel() == horizon * shape.size(),
              ErrorCode::kShape,
              "evaluate: predictor returned shape " + shape_string(pred.shape()));
      auto truth = sequence.data().subspan(context_frames * shape.size());
      rows[s].resize(horizon);
      for (std::size_t k = 0; k < horizon; ++k) {
        rows[s][k] = frame_metrics(pred.data().subspan(k * shape.size(), shape.size()),
                                   truth.subspan(k * shape.size(), shape.size()),
                                   shape);
      }
    }
  });
  return summarize(rows);
}

MetricReport evaluate(const Model<float>& model, const SequenceBatch& data) {
  const ModelConfig& c = model.config();
  check_dataset(data, c);
  return evaluate(
      [&model](const Tensor<float>& context, std::size_t horizon) {
        return predict_autoregressive(model, context, horizon);
      },
      data, c.input_frames, c.output_frames);
}

void write_train_log(const std::vector<TrainLogRow>& log,
                     const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  require(static_cast<bool>(out), ErrorCode::kIO,
          "cannot open '" + path + "' for writing");
  out << "epoch,step,loss,lr\n";
  char line[128];
  for (const auto& r : log) {
    std::snprintf(line, sizeof(line), "%zu,%zu,%.17g,%.17g\n", r.epoch, r.step,
                  r.loss, r.lr);
    out << line;
  }
  require(static_cast<bool>(out), ErrorCode::kIO, "write to '" + path + "' failed");
}

#define TCTN_INSTANTIATE(T)                                                    \
  template void adam_step(std::span<Tensor<T>>, OptimizerState<T>&,            \
                          const AdamConfig&, double);                          \
  template std::pair<Tensor<T>, Tensor<T>> teacher_forcing_pair(               \
      const Tensor<T>&);                                                       \
  template double batch_loss(const Model<T>&, const SequenceBatch&,            \
                             std::span<const std::size_t>, LossMode);          \
  template TrainResult<T> train(Model<T>&, const SequenceBatch&,               \
                                const TrainConfig&,                            \
                                const std::function<void(const TrainLogRow&)>&); \
  template Tensor<T> predict_autoregressive(                                   \
      const Model<T>&, const Tensor<T>&, std::size_t,                          \
      const std::function<void(std::size_t, const Tensor<T>&)>&);

TCTN_INSTANTIATE(float)
TCTN_INSTANTIATE(double)

#undef TCTN_INSTANTIATE

}  // namespace tctn
