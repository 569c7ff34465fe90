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

#include <algorithm>
#include <cmath>

#include "tctn/gradcheck.hpp"
#include "tctn/model.hpp"
#include "tctn/ops.hpp"
#include "tctn/rng.hpp"

namespace tctn {

bool GradSuiteReport::passed() const {
  auto ok = [](const GradSuiteEntry& e) { return e.passed(); };
  return std::all_of(ops.begin(), ops.end(), ok) &&
         std::all_of(model.begin(), model.end(), ok);
}

double GradSuiteReport::max_op_error() const {
  double m = 0.0;
  for (const auto& e : ops) m = std::max(m, e.max_error);
  return m;
}

double GradSuiteReport::max_model_error() const {
  double m = 0.0;
  for (const auto& e : model) m = std::max(m, e.max_error);
  return m;
}

namespace {

using TensorD = Tensor<double>;

TensorD random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return TensorD::from_data(std::move(shape), std::move(v), true);
}

// Values bounded away from zero, for the kink of leaky_relu.
TensorD random_away_from_zero(Rng& rng, Shape shape) {
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) {
    const double mag = rng.uniform(0.05, 1.0);
    x = rng.uniform() < 0.5 ? -mag : mag;
  }
  return TensorD::from_data(std::move(shape), std::move(v), true);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

std::size_t pick_odd(Rng& rng) { return rng.uniform() < 0.5 ? 1 : 3; }

// Projects y onto fixed random weights so every output element matters.
TensorD project(const TensorD& y, const TensorD& weights) {
  return sum(mul(y, weights));
}

// Checks f against every tensor in `inputs` and folds the result into e.
void check_all(GradSuiteEntry& e, const std::function<TensorD()>& f,
               std::vector<TensorD*> inputs, double step) {
  for (TensorD* x : inputs) {
    const GradCheckResult r = finite_diff_check(f, *x, step);
    e.max_error = std::max(e.max_error, r.max_error);
    e.checked += r.checked;
  }
}

using OpTrial = std::function<void(Rng&, GradSuiteEntry&)>;

std::vector<std::pair<const char*, OpTrial>> op_trials() {
  constexpr double h = 1e-4;
  std::vector<std::pair<const char*, OpTrial>> trials;

  trials.emplace_back("conv2d_same", [](Rng& rng, GradSuiteEntry& e) {
    const Shape in{pick(rng, 1, 3), pick(rng, 1, 5), pick(rng, 1, 5), pick(rng, 1, 3)};
    TensorD x = random_tensor(rng, in);
    TensorD k = random_tensor(rng, {pick_odd(rng), pick_odd(rng), in[3], pick(rng, 1, 3)});
    TensorD b = random_tensor(rng, {k.dim(3)});
    TensorD w = random_tensor(rng, {in[0], in[1], in[2], k.dim(3)});
    w.set_requires_grad(false);
    check_all(e, [&] { return project(conv2d_same(x, k, b), w); }, {&x, &k, &b}, h);
  });

  trials.emplace_back("causal_conv3d", [](Rng& rng, GradSuiteEntry& e) {
    const Shape in{pick(rng, 1, 4), pick(rng, 1, 4), pick(rng, 1, 4), pick(rng, 1, 3)};
    TensorD x = random_tensor(rng, in);
    TensorD k = random_tensor(
        rng, {pick(rng, 1, 3), pick_odd(rng), pick_odd(rng), in[3], pick(rng, 1, 3)});
    TensorD b = random_tensor(rng, {k.dim(4)});
    TensorD w = random_tensor(rng, {in[0], in[1], in[2], k.dim(4)});
    w.set_requires_grad(false);
    check_all(e, [&] { return project(causal_conv3d(x, k, b), w); }, {&x, &k, &b}, h);
  });

  trials.emplace_back("linear", [](Rng& rng, GradSuiteEntry& e) {
    const std::size_t din = pick(rng, 1, 5), dout = pick(rng, 1, 5);
    TensorD x = random_tensor(rng, {pick(rng, 1, 3), pick(rng, 1, 3), din});
    TensorD wt = random_tensor(rng, {din, dout});
    TensorD b = random_tensor(rng, {dout});
    TensorD w = random_tensor(rng, {x.dim(0), x.dim(1), dout});
    w.set_requires_grad(false);
    check_all(e, [&] { return project(linear(x, wt, b), w); }, {&x, &wt, &b}, h);
  });

  trials.emplace_back("masked_temporal_attention", [](Rng& rng, GradSuiteEntry& e) {
    const Shape s{pick(rng, 1, 5), pick(rng, 1, 3), pick(rng, 1, 3), pick(rng, 1, 4)};
    TensorD q = random_tensor(rng, s);
    TensorD k = random_tensor(rng, s);
    TensorD v = random_tensor(rng, s);
    TensorD w = random_tensor(rng, s);
    w.set_requires_grad(false);
    check_all(e,
              [&] {
                return project(masked_temporal_attention(q, k, v, 0.0, false, nullptr), w);
              },
              {&q, &k, &v}, h);
  });

  trials.emplace_back("masked_temporal_attention+dropout", [](Rng& rng, GradSuiteEntry& e) {
    const Shape s{pick(rng, 2, 5), pick(rng, 1, 2), pick(rng, 1, 2), pick(rng, 1, 3)};
    TensorD q = random_tensor(rng, s);
    TensorD k = random_tensor(rng, s);
    TensorD v = random_tensor(rng, s);
    TensorD w = random_tensor(rng, s);
    w.set_requires_grad(false);
    const std::uint64_t mask_seed = rng.next_u64();
    // Reseeding inside f fixes the dropout mask across evaluations.
    check_all(e,
              [&] {
                Rng mask(mask_seed);
                return project(masked_temporal_attention(q, k, v, 0.3, true, &mask), w);
              },
              {&q, &k, &v}, h);
  });

  trials.emplace_back("layer_norm", [](Rng& rng, GradSuiteEntry& e) {
    const std::size_t d = pick(rng, 2, 6);
    TensorD x = random_tensor(rng, {pick(rng, 1, 4), d});
    TensorD g = random_tensor(rng, {d});
    TensorD b = random_tensor(rng, {d});
    TensorD w = random_tensor(rng, x.shape());
    w.set_requires_grad(false);
    check_all(e, [&] { return project(layer_norm(x, g, b), w); }, {&x, &g, &b}, h);
  });

  trials.emplace_back("leaky_relu", [](Rng& rng, GradSuiteEntry& e) {
    TensorD x = random_away_from_zero(rng, {pick(rng, 1, 4), pick(rng, 1, 6)});
    TensorD w = random_tensor(rng, x.shape());
    w.set_requires_grad(false);
    const double slope = rng.uniform(0.0, 0.3);
    check_all(e, [&] { return project(leaky_relu(x, slope), w); }, {&x}, h);
  });

  trials.emplace_back("dropout", [](Rng& rng, GradSuiteEntry& e) {
    TensorD x = random_tensor(rng, {pick(rng, 1, 4), pick(rng, 1, 6)});
    TensorD w = random_tensor(rng, x.shape());
    w.set_requires_grad(false);
    const std::uint64_t mask_seed = rng.next_u64();
    check_all(e,
              [&] {
                Rng mask(mask_seed);
                return project(dropout(x, 0.4, true, &mask), w);
              },
              {&x}, h);
  });

  trials.emplace_back("mse_loss", [](Rng& rng, GradSuiteEntry& e) {
    const Shape s{pick(rng, 1, 4), pick(rng, 1, 5)};
    TensorD p = random_tensor(rng, s);
    TensorD t = random_tensor(rng, s);
    check_all(e, [&] { return mse_loss(p, t); }, {&p, &t}, h);
  });

  trials.emplace_back("elementwise", [](Rng& rng, GradSuiteEntry& e) {
    const Shape s{pick(rng, 2, 4), pick(rng, 1, 5)};
    TensorD a = random_tensor(rng, s);
    TensorD b = random_tensor(rng, s);
    const double c = rng.uniform(-2.0, 2.0);
    check_all(e,
              [&] {
                TensorD y = mul(add(a, scale(b, c)), sub(a, b));
                return add(mean(y), sum(slice_leading(y, 1, y.dim(0))));
              },
              {&a, &b}, h);
  });

  return trials;
}

// Toy model on random frames; loss is the teacher-forced MSE.
GradSuiteEntry check_model_group(Model<double>& model, const TensorD& inputs,
                                 const TensorD& targets, std::size_t index,
                                 Rng& rng, std::size_t samples) {
  auto& param = model.parameters()[index];
  TensorD x = param.tensor;
  std::vector<std::size_t> picks;
  const std::size_t n = x.numel();
  if (n <= samples) {
    for (std::size_t i = 0; i < n; ++i) picks.push_back(i);
  } else {
    for (std::size_t i = 0; i < samples; ++i) picks.push_back(rng.below(n));
  }
  const auto r = finite_diff_check(
      [&] { return mse_loss(forward_teacher_forced(inputs, model), targets); }, x,
      1e-6, picks);
  GradSuiteEntry e;
  e.name = param.name;
  e.max_error = r.max_error;
  e.checked = r.checked;
  return e;
}

}  // namespace

GradSuiteReport run_gradient_suite(std::uint64_t seed, std::size_t trials,
                                   bool include_model,
                                   std::size_t model_samples) {
  require(trials >= 1, ErrorCode::kArgument, "gradient suite needs >= 1 trial");
  GradSuiteReport report;
  Rng rng = Rng::derive(seed, 0x6772616400000000ull);
  for (auto& [name, trial] : op_trials()) {
    GradSuiteEntry e;
    e.name = name;
    e.tolerance = kOpGradTolerance;
    for (std::size_t t = 0; t < trials; ++t) {
      trial(rng, e);
      ++e.trials;
    }
    report.ops.push_back(std::move(e));
  }
  if (!include_model) return report;

  const ModelConfig config = ModelConfig::toy();
  for (std::size_t t = 0; t < trials; ++t) {
    Model<double> model = Model<double>::init(config, rng.next_u64());
    // Nonzero biases and norms so every group has a nontrivial gradient.
    for (const auto& p : model.parameters()) {
      if (p.kind == ParamKind::kWeight) continue;
      Tensor<double> tensor = p.tensor;
      for (double& v : tensor.mutable_data()) v += rng.uniform(-0.2, 0.2);
    }
    const std::size_t frames = config.input_frames + config.output_frames - 1;
    const Shape s{frames, config.height, config.width, config.channels};
    TensorD inputs = random_tensor(rng, s, 0.0, 1.0);
    TensorD targets = random_tensor(rng, s, 0.0, 1.0);
    inputs.set_requires_grad(false);
    targets.set_requires_grad(false);
    for (std::size_t i = 0; i < model.parameters().size(); ++i) {
      GradSuiteEntry e = check_model_group(model, inputs, targets, i, rng, model_samples);
      if (t == 0) {
        e.tolerance = kModelGradTolerance;
        e.trials = 1;
        report.model.push_back(e);
      } else {
        GradSuiteEntry& acc = report.model[i];
        acc.max_error = std::max(acc.max_error, e.max_error);
        acc.checked += e.checked;
        ++acc.trials;
      }
    }
  }
  return report;
}

}  // namespace tctn
