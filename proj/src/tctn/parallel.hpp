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

#ifndef TCTN_PARALLEL_HPP_
#define TCTN_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace tctn {

// Process-wide worker count used by the tensor kernels. Defaults to 1.
void set_num_threads(int threads);
int num_threads();

// Splits [0, n) into contiguous chunks, one per worker, and runs
// body(begin, end) on each. Chunk boundaries depend only on n and the
// thread count. Nested calls from inside a worker run inline.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace tctn

#endif  // TCTN_PARALLEL_HPP_
