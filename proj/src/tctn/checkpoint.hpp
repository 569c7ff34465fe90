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

#ifndef TCTN_CHECKPOINT_HPP_
#define TCTN_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "tctn/model.hpp"

namespace tctn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little-endian): "TCTN", u32 version, u32 length + model config
// text, u32 record count, then per parameter: u32 name length, name bytes,
// u32 rank, u32 extents, float32 values.
template <typename T>
std::vector<std::uint8_t> encode_checkpoint(const Model<T>& model);

template <typename T>
Model<T> decode_checkpoint(std::vector<std::uint8_t> bytes,
                           const std::string& source = "<memory>");

template <typename T>
void save_checkpoint(const Model<T>& model, const std::string& path);

template <typename T>
Model<T> load_checkpoint(const std::string& path);

}  // namespace tctn

#endif  // TCTN_CHECKPOINT_HPP_
