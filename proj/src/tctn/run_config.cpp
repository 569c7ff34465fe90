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

#include "tctn/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace tctn {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char* expected) {
  fail(ErrorCode::kConfig, "config key '" + std::string(key) + "': '" +
                               std::string(value) + "' is not " + expected);
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  return static_cast<std::size_t>(parse_u64(key, v));
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a number");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true/false");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  bool model;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SIZE_FIELD(name, member, is_model)                                     \
  Field {                                                                      \
    name, is_model,                                                            \
        [](RunConfig& c, std::string_view v) { c.member = parse_size(name, v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }            \
  }
#define DOUBLE_FIELD(name, member, is_model)                                   \
  Field {                                                                      \
    name, is_model,                                                            \
        [](RunConfig& c, std::string_view v) { c.member = parse_double(name, v); }, \
        [](const RunConfig& c) { return format_double(c.member); }             \
  }
#define STRING_FIELD(name, member)                                             \
  Field {                                                                      \
    name, false,                                                               \
        [](RunConfig& c, std::string_view v) { c.member = std::string(v); },   \
        [](const RunConfig& c) { return c.member; }                            \
  }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      SIZE_FIELD("input_frames", model.input_frames, true),
      SIZE_FIELD("output_frames", model.output_frames, true),
      SIZE_FIELD("height", model.height, true),
      SIZE_FIELD("width", model.width, true),
      SIZE_FIELD("channels", model.channels, true),
      SIZE_FIELD("embed_dim", model.embed_dim, true),
      SIZE_FIELD("blocks", model.blocks, true),
      SIZE_FIELD("embed_kernel", model.embed_kernel, true),
      SIZE_FIELD("tc_kernel_t", model.tc_kernel_t, true),
      SIZE_FIELD("tc_kernel_h", model.tc_kernel_h, true),
      SIZE_FIELD("tc_kernel_w", model.tc_kernel_w, true),
      DOUBLE_FIELD("dropout", model.dropout, true),
      DOUBLE_FIELD("lrelu_slope", model.lrelu_slope, true),
      Field{"qkv_bias", true,
            [](RunConfig& c, std::string_view v) {
              c.model.qkv_bias = parse_bool("qkv_bias", v);
            },
            [](const RunConfig& c) {
              return std::string(c.model.qkv_bias ? "true" : "false");
            }},
      Field{"seed", true,
            [](RunConfig& c, std::string_view v) {
              c.seed = parse_u64("seed", v);
              c.model.seed = c.seed;
              c.train.seed = c.seed;
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      SIZE_FIELD("batch_size", train.batch_size, false),
      DOUBLE_FIELD("lr", train.base_lr, false),
      DOUBLE_FIELD("min_lr", train.min_lr, false),
      SIZE_FIELD("epochs", train.epochs, false),
      SIZE_FIELD("max_steps", train.max_steps, false),
      DOUBLE_FIELD("beta1", train.beta1, false),
      DOUBLE_FIELD("beta2", train.beta2, false),
      DOUBLE_FIELD("adam_eps", train.adam_eps, false),
      Field{"loss", false,
            [](RunConfig& c, std::string_view v) {
              if (v == "all") {
                c.train.loss = LossMode::kAllShifted;
              } else if (v == "future") {
                c.train.loss = LossMode::kFutureOnly;
              } else {
                bad_value("loss", v, "'all' or 'future'");
              }
            },
            [](const RunConfig& c) {
              return std::string(c.train.loss == LossMode::kAllShifted ? "all"
                                                                       : "future");
            }},
      Field{"shuffle", false,
            [](RunConfig& c, std::string_view v) {
              c.train.shuffle = parse_bool("shuffle", v);
            },
            [](const RunConfig& c) {
              return std::string(c.train.shuffle ? "true" : "false");
            }},
      SIZE_FIELD("count", data.count, false),
      SIZE_FIELD("sprites_per_sequence", data.sprites_per_sequence, false),
      SIZE_FIELD("sprite_size", data.sprite_size, false),
      STRING_FIELD("idx_path", data.idx_path),
      STRING_FIELD("dataset", dataset),
      STRING_FIELD("checkpoint", checkpoint),
      STRING_FIELD("out", out_dir),
      SIZE_FIELD("threads", threads, false),
      SIZE_FIELD("sequence_index", sequence_index, false),
      SIZE_FIELD("gradcheck_trials", gradcheck_trials, false),
  };
  return fields;
}

#undef SIZE_FIELD
#undef DOUBLE_FIELD
#undef STRING_FIELD

const Field& lookup(std::string_view key) {
  for (const Field& f : schema()) {
    if (key == f.key) return f;
  }
  fail(ErrorCode::kConfig, "unknown config key '" + std::string(key) + "'");
}

// Calls apply(key, value, line) for every non-empty line.
void for_each_entry(
    std::string_view text, const std::string& source,
    const std::function<void(const std::string&, const std::string&)>& apply) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::kConfig,
            source + ":" + std::to_string(line_no) +
                ": expected 'key = value', got '" + body + "'");
    try {
      apply(trim(std::string_view(body).substr(0, eq)),
            trim(std::string_view(body).substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  lookup(key).set(*this, trim(value));
}

std::string RunConfig::get(std::string_view key) const {
  return lookup(key).get(*this);
}

void RunConfig::merge_text(std::string_view text, const std::string& source) {
  for_each_entry(text, source, [this](const std::string& k, const std::string& v) {
    set(k, v);
  });
}

void RunConfig::merge_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::kIO,
          "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  merge_text(buf.str(), path);
}

std::string RunConfig::dump() const {
  std::string out;
  for (const Field& f : schema()) {
    out += f.key;
    out += " = ";
    out += f.get(*this);
    out += '\n';
  }
  return out;
}

void RunConfig::validate() const {
  model.validate();
  train.validate();
  require(threads >= 1, ErrorCode::kConfig, "threads must be >= 1");
  require(data.count >= 1, ErrorCode::kConfig, "count must be >= 1");
  require(data.sprite_size >= 1, ErrorCode::kConfig, "sprite_size must be >= 1");
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Field& f : schema()) out.emplace_back(f.key);
    return out;
  }();
  return names;
}

std::string format_model_config(const ModelConfig& config) {
  RunConfig rc;
  rc.model = config;
  rc.seed = config.seed;
  std::string out;
  for (const Field& f : schema()) {
    if (!f.model) continue;
    out += f.key;
    out += " = ";
    out += f.get(rc);
    out += '\n';
  }
  return out;
}

ModelConfig parse_model_config(std::string_view text) {
  RunConfig rc;
  for_each_entry(text, "<model config>",
                 [&rc](const std::string& k, const std::string& v) {
                   const Field& f = lookup(k);
                   require(f.model, ErrorCode::kFormat,
                           "'" + k + "' is not a model key");
                   f.set(rc, v);
                 });
  rc.model.validate();
  return rc.model;
}

}  // namespace tctn
