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

#include "tctn/checkpoint.hpp"

#include <algorithm>
#include <set>

#include "tctn/binary_io.hpp"
#include "tctn/run_config.hpp"

namespace tctn {
namespace {
constexpr char kMagic[4] = {'T', 'C', 'T', 'N'};
}  // namespace

template <typename T>
std::vector<std::uint8_t> encode_checkpoint(const Model<T>& model) {
  io::Writer out;
  out.bytes(kMagic, 4);
  out.u32(kCheckpointVersion);
  out.string(format_model_config(model.config()));
  out.u32(static_cast<std::uint32_t>(model.parameters().size()));
  for (const auto& p : model.parameters()) {
    out.string(p.name);
    out.u32(static_cast<std::uint32_t>(p.tensor.rank()));
    for (std::size_t d : p.tensor.shape()) out.u32(static_cast<std::uint32_t>(d));
    for (T v : p.tensor.data()) out.f32(static_cast<float>(v));
  }
  return out.buffer();
}

template <typename T>
Model<T> decode_checkpoint(std::vector<std::uint8_t> bytes,
                           const std::string& source) {
  io::Reader in(std::move(bytes), source);
  char magic[4];
  in.bytes(magic, 4);
  require(std::equal(magic, magic + 4, kMagic), ErrorCode::kFormat,
          "'" + source + "' is not a TCTN checkpoint");
  const std::uint32_t version = in.u32();
  require(version == kCheckpointVersion, ErrorCode::kFormat,
          "'" + source + "' has unsupported checkpoint version " +
              std::to_string(version));
  Model<T> model(parse_model_config(in.string()));
  const std::uint32_t records = in.u32();
  require(records == model.parameters().size(), ErrorCode::kFormat,
          "'" + source + "' holds " + std::to_string(records) +
              " parameters, its config implies " +
              std::to_string(model.parameters().size()));
  std::set<std::string> seen;
  for (std::uint32_t r = 0; r < records; ++r) {
    const std::string name = in.string();
    require(seen.insert(name).second, ErrorCode::kFormat,
            "'" + source + "' repeats parameter '" + name + "'");
    Tensor<T> target;
    try {
      target = model.parameter(name);
    } catch (const Error&) {
      fail(ErrorCode::kFormat,
           "'" + source + "' has unexpected parameter '" + name + "'");
    }
    Shape shape(in.u32());
    for (auto& d : shape) d = in.u32();
    require(shape == target.shape(), ErrorCode::kFormat,
            "'" + source + "': parameter '" + name + "' has shape " +
                shape_string(shape) + ", expected " +
                shape_string(target.shape()));
    for (T& v : target.mutable_data()) v = static_cast<T>(in.f32());
  }
  require(in.remaining() == 0, ErrorCode::kFormat,
          "'" + source + "' has trailing bytes");
  return model;
}

template <typename T>
void save_checkpoint(const Model<T>& model, const std::string& path) {
  io::write_file(path, encode_checkpoint(model));
}

template <typename T>
Model<T> load_checkpoint(const std::string& path) {
  return decode_checkpoint<T>(io::Reader::read_file(path), path);
}

#define TCTN_INSTANTIATE(T)                                                   \
  template std::vector<std::uint8_t> encode_checkpoint(const Model<T>&);      \
  template Model<T> decode_checkpoint<T>(std::vector<std::uint8_t>,           \
                                         const std::string&);                 \
  template void save_checkpoint(const Model<T>&, const std::string&);         \
  template Model<T> load_checkpoint<T>(const std::string&);

TCTN_INSTANTIATE(float)
TCTN_INSTANTIATE(double)

#undef TCTN_INSTANTIATE

}  // namespace tctn
