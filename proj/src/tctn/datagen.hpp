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

#ifndef TCTN_DATAGEN_HPP_
#define TCTN_DATAGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tctn/tensor.hpp"

namespace tctn {

struct Extent {
  std::size_t height = 0;
  std::size_t width = 0;
};

// Grayscale bitmap with values in [0,1].
struct Sprite {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> pixels;
  int label = -1;

  Extent extent() const { return {rows, cols}; }
};

// Reads an IDX3 image file (big-endian magic 0x00000803, count, rows, cols,
// then count*rows*cols unsigned bytes). Pixels are scaled by 1/255.
std::vector<Sprite> load_idx(const std::string& path);

// Offline stand-in for MNIST digits: one filled square of side `size`.
std::vector<Sprite> square_sprites(std::size_t size);

// Top-left corner (x = column, y = row) and per-frame velocity in pixels.
struct MotionState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  double speed() const;
};

// Advances `steps` frames inside the canvas. Crossing a wall reflects the
// offending velocity component and mirrors the overshoot, so speed is
// conserved exactly. Returns steps + 1 states, starting with `state`.
std::vector<MotionState> simulate_bounce(const MotionState& state,
                                         Extent canvas, Extent sprite,
                                         std::size_t steps);

struct Placement {
  const Sprite* sprite = nullptr;
  std::size_t row = 0;
  std::size_t col = 0;
};

// Composites sprites onto a zero canvas with a pixel-wise max.
std::vector<float> render_frame(std::span<const Placement> placements,
                                Extent canvas);

inline constexpr double kMinSpeed = 3.0;
inline constexpr double kMaxSpeed = 5.0;

// Motion of one generated sequence; deterministic in (seed, index).
struct SequenceMotion {
  std::vector<std::size_t> sprite_ids;
  std::vector<std::vector<MotionState>> trajectories;
};

SequenceMotion sample_motion(std::size_t sprite_count, Extent canvas,
                             std::span<const Extent> sprite_extents,
                             std::size_t sprites_per_sequence,
                             std::size_t length, std::uint64_t seed,
                             std::uint64_t index);

// A batch of frame sequences, [B, L, H, W, C] with values in [0,1].
struct SequenceBatch {
  Tensor<float> frames;

  std::size_t count() const { return frames.dim(0); }
  std::size_t length() const { return frames.dim(1); }
  std::size_t height() const { return frames.dim(2); }
  std::size_t width() const { return frames.dim(3); }
  std::size_t channels() const { return frames.dim(4); }

  // Copy of sequence b as [L, H, W, C].
  template <typename T>
  Tensor<T> sequence(std::size_t b) const;
};

struct GenerateOptions {
  std::size_t count = 0;
  std::size_t length = 20;
  Extent canvas{64, 64};
  std::size_t sprites_per_sequence = 2;
  std::uint64_t seed = 0;
  // Sequence i of the output uses generator stream first_index + i, so a
  // long stream can be produced in chunks.
  std::uint64_t first_index = 0;
};

// Bouncing-sprite sequences: sprites chosen uniformly with replacement,
// uniform start positions, direction uniform in [0, 2pi), speed uniform in
// [3, 5). Single channel.
SequenceBatch generate_dataset(const std::vector<Sprite>& sprites,
                               const GenerateOptions& options);

// "TCTD" container: magic, u32 version, u32 B/L/H/W/C, then little-endian
// float32 frames in sequence-major order.
void save_dataset(const SequenceBatch& batch, const std::string& path);
SequenceBatch load_dataset(const std::string& path);
std::vector<std::uint8_t> encode_dataset(const SequenceBatch& batch);

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);
std::uint64_t file_checksum(const std::string& path);

}  // namespace tctn

#endif  // TCTN_DATAGEN_HPP_
