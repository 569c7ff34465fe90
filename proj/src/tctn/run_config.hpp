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

#ifndef TCTN_RUN_CONFIG_HPP_
#define TCTN_RUN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tctn/harness.hpp"
#include "tctn/model.hpp"

namespace tctn {

struct DataConfig {
  // Sequences written by datagen.
  std::size_t count = 2000;
  std::size_t sprites_per_sequence = 2;
  // Side of the procedural square used when no IDX file is given.
  std::size_t sprite_size = 28;
  std::string idx_path;
};

// Flat key=value run configuration. Every key is checked against a fixed
// schema; unknown keys and malformed values raise kConfig.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  DataConfig data;
  std::string dataset;
  std::string checkpoint;
  std::string out_dir = ".";
  std::size_t threads = 1;
  // Drives parameter init, training order/dropout and data generation.
  std::uint64_t seed = 0;
  std::size_t sequence_index = 0;
  std::size_t gradcheck_trials = 20;

  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  // Applies "key = value" lines; '#' starts a comment.
  void merge_text(std::string_view text, const std::string& source = "<text>");
  void merge_file(const std::string& path);

  // Every key with its effective value, one "key = value" line each.
  std::string dump() const;

  void validate() const;

  static const std::vector<std::string>& keys();
};

// The architecture subset of the schema, used inside checkpoints.
std::string format_model_config(const ModelConfig& config);
ModelConfig parse_model_config(std::string_view text);

}  // namespace tctn

#endif  // TCTN_RUN_CONFIG_HPP_
