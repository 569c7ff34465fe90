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

#include "tctn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tctn/binary_io.hpp"
#include "tctn/parallel.hpp"
#include "tctn/rng.hpp"

namespace tctn {

namespace {
constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr char kDatasetMagic[4] = {'T', 'C', 'T', 'D'};
constexpr std::uint32_t kDatasetVersion = 1;
}  // namespace

std::vector<Sprite> load_idx(const std::string& path) {
  io::Reader in = io::Reader::open(path);
  const std::uint32_t magic = in.u32_big_endian();
  if (magic != kIdxImageMagic) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", magic);
    fail(ErrorCode::kFormat, "'" + path + "' is not an IDX image file (magic " +
                                 buf + ", expected 0x00000803)");
  }
  const std::uint32_t count = in.u32_big_endian();
  const std::uint32_t rows = in.u32_big_endian();
  const std::uint32_t cols = in.u32_big_endian();
  require(rows > 0 && cols > 0, ErrorCode::kFormat,
          "'" + path + "' declares empty images");
  const std::size_t image = std::size_t{rows} * cols;
  require(in.remaining() >= image * count, ErrorCode::kLength,
          "'" + path + "' payload holds " + std::to_string(in.remaining()) +
              " bytes, header promises " + std::to_string(image * count));
  std::vector<Sprite> sprites(count);
  for (auto& s : sprites) {
    s.rows = rows;
    s.cols = cols;
    auto bytes = in.take(image);
    s.pixels.resize(image);
    std::transform(bytes.begin(), bytes.end(), s.pixels.begin(),
                   [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  }
  return sprites;
}

std::vector<Sprite> square_sprites(std::size_t size) {
  require(size >= 1, ErrorCode::kConfig, "sprite size must be >= 1");
  Sprite s;
  s.rows = size;
  s.cols = size;
  s.pixels.assign(size * size, 1.0f);
  return {s};
}

double MotionState::speed() const { return std::sqrt(vx * vx + vy * vy); }

namespace {

void advance_axis(double& pos, double& vel, double max_pos) {
  pos += vel;
  if (max_pos == 0.0) {
    pos = 0.0;
    return;
  }
  while (pos < 0.0 || pos > max_pos) {
    if (pos > max_pos) {
      pos = 2.0 * max_pos - pos;
    } else {
      pos = -pos;
    }
    vel = -vel;
  }
}

}  // namespace

std::vector<MotionState> simulate_bounce(const MotionState& state,
                                         Extent canvas, Extent sprite,
                                         std::size_t steps) {
  require(sprite.height <= canvas.height && sprite.width <= canvas.width,
          ErrorCode::kConfig, "sprite larger than canvas");
  const double max_x = static_cast<double>(canvas.width - sprite.width);
  const double max_y = static_cast<double>(canvas.height - sprite.height);
  require(state.x >= 0.0 && state.x <= max_x && state.y >= 0.0 &&
              state.y <= max_y,
          ErrorCode::kArgument, "initial position outside the canvas");
  std::vector<MotionState> path;
  path.reserve(steps + 1);
  path.push_back(state);
  MotionState s = state;
  for (std::size_t i = 0; i < steps; ++i) {
    advance_axis(s.x, s.vx, max_x);
    advance_axis(s.y, s.vy, max_y);
    path.push_back(s);
  }
  return path;
}

std::vector<float> render_frame(std::span<const Placement> placements,
                                Extent canvas) {
  std::vector<float> frame(canvas.height * canvas.width, 0.0f);
  for (const Placement& p : placements) {
    const Sprite& s = *p.sprite;
    require(p.row + s.rows <= canvas.height && p.col + s.cols <= canvas.width,
            ErrorCode::kInvalidState, "render_frame: sprite placed out of bounds");
    for (std::size_t r = 0; r < s.rows; ++r) {
      float* dst = frame.data() + (p.row + r) * canvas.width + p.col;
      const float* src = s.pixels.data() + r * s.cols;
      for (std::size_t c = 0; c < s.cols; ++c) dst[c] = std::max(dst[c], src[c]);
    }
  }
  return frame;
}

SequenceMotion sample_motion(std::size_t sprite_count, Extent canvas,
                             std::span<const Extent> sprite_extents,
                             std::size_t sprites_per_sequence,
                             std::size_t length, std::uint64_t seed,
                             std::uint64_t index) {
  require(sprite_count >= 1, ErrorCode::kArgument, "no sprites available");
  require(length >= 1, ErrorCode::kArgument, "sequence length must be >= 1");
  Rng rng = Rng::derive(seed, index);
  SequenceMotion m;
  for (std::size_t k = 0; k < sprites_per_sequence; ++k) {
    const std::size_t id = static_cast<std::size_t>(rng.below(sprite_count));
    const Extent e = sprite_extents[id];
    require(e.height <= canvas.height && e.width <= canvas.width,
            ErrorCode::kConfig, "sprite larger than canvas");
    MotionState s;
    s.x = rng.uniform(0.0, static_cast<double>(canvas.width - e.width));
    s.y = rng.uniform(0.0, static_cast<double>(canvas.height - e.height));
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double speed = rng.uniform(kMinSpeed, kMaxSpeed);
    s.vx = speed * std::cos(angle);
    s.vy = speed * std::sin(angle);
    m.sprite_ids.push_back(id);
    m.trajectories.push_back(simulate_bounce(s, canvas, e, length - 1));
  }
  return m;
}

template <typename T>
Tensor<T> SequenceBatch::sequence(std::size_t b) const {
  require(b < count(), ErrorCode::kArgument,
          "sequence index " + std::to_string(b) + " out of range");
  const std::size_t n = frames.numel() / count();
  auto src = frames.data().subspan(b * n, n);
  return Tensor<T>::from_data({length(), height(), width(), channels()},
                              std::vector<T>(src.begin(), src.end()));
}

template Tensor<float> SequenceBatch::sequence<float>(std::size_t) const;
template Tensor<double> SequenceBatch::sequence<double>(std::size_t) const;

SequenceBatch generate_dataset(const std::vector<Sprite>& sprites,
                               const GenerateOptions& o) {
  require(o.count >= 1, ErrorCode::kArgument,
          "sequence count must be positive");
  require(!sprites.empty(), ErrorCode::kArgument, "no sprites available");
  require(o.length >= 1 && o.canvas.height >= 1 && o.canvas.width >= 1,
          ErrorCode::kArgument, "invalid sequence extents");
  std::vector<Extent> extents;
  for (const auto& s : sprites) extents.push_back(s.extent());

  const std::size_t frame_size = o.canvas.height * o.canvas.width;
  const std::size_t seq_size = o.length * frame_size;
  std::vector<float> data(o.count * seq_size);
  parallel_for(o.count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SequenceMotion m =
          sample_motion(sprites.size(), o.canvas, extents,
                        o.sprites_per_sequence, o.length, o.seed,
                        o.first_index + i);
      std::vector<Placement> placements(m.sprite_ids.size());
      for (std::size_t t = 0; t < o.length; ++t) {
        for (std::size_t k = 0; k < placements.size(); ++k) {
          const MotionState& s = m.trajectories[k][t];
          placements[k] = {&sprites[m.sprite_ids[k]],
                           static_cast<std::size_t>(std::lround(s.y)),
                           static_cast<std::size_t>(std::lround(s.x))};
        }
        const std::vector<float> frame = render_frame(placements, o.canvas);
        std::copy(frame.begin(), frame.end(),
                  data.begin() + i * seq_size + t * frame_size);
      }
    }
  });
  SequenceBatch batch;
  batch.frames = Tensor<float>::from_data(
      {o.count, o.length, o.canvas.height, o.canvas.width, 1}, std::move(data));
  return batch;
}

std::vector<std::uint8_t> encode_dataset(const SequenceBatch& batch) {
  io::Writer out;
  out.bytes(kDatasetMagic, 4);
  out.u32(kDatasetVersion);
  for (std::size_t d : batch.frames.shape()) out.u32(static_cast<std::uint32_t>(d));
  for (float v : batch.frames.data()) out.f32(v);
  return out.buffer();
}

void save_dataset(const SequenceBatch& batch, const std::string& path) {
  io::write_file(path, encode_dataset(batch));
}

SequenceBatch load_dataset(const std::string& path) {
  io::Reader in = io::Reader::open(path);
  char magic[4];
  in.bytes(magic, 4);
  require(std::equal(magic, magic + 4, kDatasetMagic), ErrorCode::kFormat,
          "'" + path + "' is not a TCTD dataset");
  const std::uint32_t version = in.u32();
  require(version == kDatasetVersion, ErrorCode::kFormat,
          "'" + path + "' has unsupported dataset version " +
              std::to_string(version));
  Shape shape(5);
  for (auto& d : shape) {
    d = in.u32();
    require(d > 0, ErrorCode::kFormat, "'" + path + "' has a zero extent");
  }
  const std::size_t n = shape_numel(shape);
  require(in.remaining() == n * 4, ErrorCode::kLength,
          "'" + path + "' payload size does not match its header");
  std::vector<float> data(n);
  for (float& v : data) v = in.f32();
  SequenceBatch batch;
  batch.frames = Tensor<float>::from_data(std::move(shape), std::move(data));
  return batch;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t file_checksum(const std::string& path) {
  return fnv1a64(io::Reader::read_file(path));
}

}  // namespace tctn
