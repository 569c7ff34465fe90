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

// tctn: data generation, training, evaluation, prediction and gradient
// verification for the TCTN video predictor.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tctn/tctn.h"

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIO = 3,
  kExitData = 4,
  kExitNumeric = 5,
  kExitGradcheck = 6,
};

int exit_code_for(tctn_status s) {
  switch (s) {
    case TCTN_OK: return kExitOk;
    case TCTN_ERR_ARGUMENT:
    case TCTN_ERR_CONFIG: return kExitConfig;
    case TCTN_ERR_IO: return kExitIO;
    case TCTN_ERR_SHAPE:
    case TCTN_ERR_FORMAT:
    case TCTN_ERR_LENGTH:
    case TCTN_ERR_DATA: return kExitData;
    case TCTN_ERR_NUMERIC: return kExitNumeric;
    default: return kExitInternal;
  }
}

// Thrown to unwind a command with a C API failure.
struct Failure {
  tctn_status status;
  std::string context;
};

void check(tctn_status s, const std::string& context) {
  if (s != TCTN_OK) throw Failure{s, context};
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Config = Handle<tctn_config, tctn_config_destroy>;
using Dataset = Handle<tctn_dataset, tctn_dataset_destroy>;
using Model = Handle<tctn_model, tctn_model_destroy>;
using Report = Handle<tctn_report, tctn_report_destroy>;

std::string config_get(const Config& config, const char* key) {
  std::size_t n = 0;
  check(tctn_config_get(config.get(), key, nullptr, 0, &n), key);
  std::string value(n + 1, '\0');
  check(tctn_config_get(config.get(), key, value.data(), value.size(), nullptr), key);
  value.resize(n);
  return value;
}

std::string config_dump(const Config& config) {
  std::size_t n = 0;
  check(tctn_config_dump(config.get(), nullptr, 0, &n), "dump config");
  std::string text(n + 1, '\0');
  check(tctn_config_dump(config.get(), text.data(), text.size(), nullptr),
        "dump config");
  text.resize(n);
  return text;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

// Path from a config key, or `fallback` inside the output directory.
std::string path_or(const Config& config, const char* key,
                    const std::string& out_dir, const char* fallback) {
  std::string p = config_get(config, key);
  return p.empty() ? join(out_dir, fallback) : p;
}

std::string required_path(const Config& config, const char* key) {
  std::string p = config_get(config, key);
  if (p.empty()) {
    std::fprintf(stderr, "error: set '%s' in the config file or with --set %s=<path>\n",
                 key, key);
    throw Failure{TCTN_ERR_CONFIG, std::string("missing ") + key};
  }
  return p;
}

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed;
  std::string threads;
  std::string out;
};

int run_datagen(const Config& config, const std::string& out_dir) {
  Dataset data;
  check(tctn_dataset_generate(config.get(), data.out()), "datagen");
  const std::string path = path_or(config, "dataset", out_dir, "dataset.tctd");
  check(tctn_dataset_save(data.get(), path.c_str()), "save dataset");
  std::size_t d[5];
  check(tctn_dataset_shape(data.get(), d), "dataset shape");
  std::uint64_t sum = 0;
  check(tctn_file_checksum(path.c_str(), &sum), "checksum");
  std::printf("wrote %s\n", path.c_str());
  std::printf("count=%zu length=%zu height=%zu width=%zu channels=%zu\n", d[0],
              d[1], d[2], d[3], d[4]);
  std::printf("checksum=%016" PRIx64 "\n", sum);
  return kExitOk;
}

void print_step(std::size_t epoch, std::size_t step, double loss, double lr,
                void*) {
  std::printf("epoch %zu step %zu loss %.6g lr %.6g\n", epoch, step, loss, lr);
  std::fflush(stdout);
}

int run_train(const Config& config, const std::string& out_dir) {
  Dataset data;
  check(tctn_dataset_load(required_path(config, "dataset").c_str(), data.out()),
        "load dataset");
  Model model;
  check(tctn_model_create(config.get(), model.out()), "create model");
  std::printf("parameters=%zu\n", tctn_model_parameter_count(model.get()));
  const std::string log = join(out_dir, "train_log.csv");
  check(tctn_train(model.get(), data.get(), config.get(), print_step, nullptr,
                   log.c_str()),
        "train");
  const std::string ckpt = path_or(config, "checkpoint", out_dir, "model.ckpt");
  check(tctn_model_save(model.get(), ckpt.c_str()), "save checkpoint");
  std::printf("wrote %s and %s\n", log.c_str(), ckpt.c_str());
  return kExitOk;
}

int run_eval(const Config& config, const std::string& out_dir) {
  Model model;
  check(tctn_model_load(required_path(config, "checkpoint").c_str(), model.out()),
        "load checkpoint");
  Dataset data;
  check(tctn_dataset_load(required_path(config, "dataset").c_str(), data.out()),
        "load dataset");
  Report report;
  check(tctn_evaluate(model.get(), data.get(), report.out()), "evaluate");
  const std::string csv = join(out_dir, "metrics.csv");
  check(tctn_report_write_csv(report.get(), csv.c_str()), "write metrics");
  double psnr = 0, ssim = 0, mae = 0;
  for (std::size_t k = 1; k <= tctn_report_frames(report.get()); ++k) {
    check(tctn_report_metrics(report.get(), k, &psnr, &ssim, &mae), "metrics");
    std::printf("frame %zu psnr %.4f ssim %.4f mae %.4f\n", k, psnr, ssim, mae);
  }
  check(tctn_report_metrics(report.get(), 0, &psnr, &ssim, &mae), "metrics");
  std::printf("mean psnr %.4f ssim %.4f mae %.4f\n", psnr, ssim, mae);
  std::printf("wrote %s\n", csv.c_str());
  return kExitOk;
}

int run_predict(const Config& config, const std::string& out_dir) {
  Model model;
  check(tctn_model_load(required_path(config, "checkpoint").c_str(), model.out()),
        "load checkpoint");
  Dataset data;
  check(tctn_dataset_load(required_path(config, "dataset").c_str(), data.out()),
        "load dataset");
  const std::size_t index = std::stoull(config_get(config, "sequence_index"));
  Dataset pred;
  check(tctn_predict(model.get(), data.get(), index, pred.out()), "predict");
  std::size_t d[5];
  check(tctn_dataset_shape(pred.get(), d), "prediction shape");
  for (std::size_t k = 0; k < d[1]; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "pred_%02zu.pgm", k + 1);
    const std::string path = join(out_dir, name);
    check(tctn_dataset_write_pgm(pred.get(), 0, k, path.c_str()), "write frame");
  }
  const std::string raw = join(out_dir, "prediction.tctd");
  check(tctn_dataset_save(pred.get(), raw.c_str()), "save prediction");
  std::printf("wrote %zu frames and %s\n", d[1], raw.c_str());
  return kExitOk;
}

void print_check(const char* name, double err, double tol, std::size_t checked,
                 void*) {
  std::printf("%-36s max_rel_error %.3e tol %.0e checked %zu %s\n", name, err,
              tol, checked, err < tol ? "ok" : "FAIL");
}

int run_gradcheck(const Config& config, const std::string&) {
  double op_err = 0, model_err = 0;
  int passed = 0;
  check(tctn_gradcheck(config.get(), print_check, nullptr, &op_err, &model_err,
                       &passed),
        "gradcheck");
  std::printf("max op error %.3e, max model error %.3e: %s\n", op_err, model_err,
              passed ? "passed" : "FAILED");
  return passed ? kExitOk : kExitGradcheck;
}

int run_command(const std::string& name, const Options& opt) {
  Config config;
  check(tctn_config_create(config.out()), "create config");
  if (!opt.config_path.empty()) {
    check(tctn_config_merge_file(config.get(), opt.config_path.c_str()),
          "read config");
  }
  for (const std::string& kv : opt.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw Failure{TCTN_ERR_CONFIG, "--set expects key=value, got '" + kv + "'"};
    }
    check(tctn_config_set(config.get(), kv.substr(0, eq).c_str(),
                          kv.substr(eq + 1).c_str()),
          "--set " + kv);
  }
  if (!opt.seed.empty()) check(tctn_config_set(config.get(), "seed", opt.seed.c_str()), "--seed");
  if (!opt.threads.empty()) {
    check(tctn_config_set(config.get(), "threads", opt.threads.c_str()), "--threads");
  }
  if (!opt.out.empty()) check(tctn_config_set(config.get(), "out", opt.out.c_str()), "--out");
  check(tctn_config_validate(config.get()), "config");

  const int threads = std::stoi(config_get(config, "threads"));
  check(tctn_set_num_threads(threads), "threads");

  const std::string out_dir = config_get(config, "out");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Failure{TCTN_ERR_IO, "cannot create output directory '" + out_dir + "'"};
  const std::string echo = join(out_dir, name + ".config");
  const std::string dump = config_dump(config);
  std::FILE* f = std::fopen(echo.c_str(), "w");
  if (!f) throw Failure{TCTN_ERR_IO, "cannot write '" + echo + "'"};
  std::fputs(dump.c_str(), f);
  std::fclose(f);

  if (name == "datagen") return run_datagen(config, out_dir);
  if (name == "train") return run_train(config, out_dir);
  if (name == "eval") return run_eval(config, out_dir);
  if (name == "predict") return run_predict(config, out_dir);
  return run_gradcheck(config, out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TCTN video frame prediction"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"datagen", "Generate a bouncing-sprite dataset container"},
      {"train", "Train a model and write the log and checkpoint"},
      {"eval", "Evaluate a checkpoint and write per-frame metrics"},
      {"predict", "Roll out one sequence and write PGM frames"},
      {"gradcheck", "Run the finite-difference gradient suite"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "key = value config file");
    sub->add_option("--seed", opt.seed, "Seed (u64), overrides the config");
    sub->add_option("--threads", opt.threads, "Worker threads, overrides the config");
    sub->add_option("--out", opt.out, "Output directory, overrides the config");
    sub->add_option("--set", opt.overrides, "Extra key=value override (repeatable)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run_command(name, opt);
  } catch (const Failure& f) {
    const char* detail = tctn_last_error();
    std::fprintf(stderr, "tctn %s: %s error in %s%s%s\n", name.c_str(),
                 tctn_status_name(f.status), f.context.c_str(),
                 *detail ? ": " : "", detail);
    return exit_code_for(f.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tctn %s: %s\n", name.c_str(), e.what());
    return kExitInternal;
  }
}
