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

#ifndef TCTN_TESTS_TEST_UTIL_HPP_
#define TCTN_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "tctn/rng.hpp"
#include "tctn/tensor.hpp"

namespace tctn::testing {

template <typename T = double>
Tensor<T> random_tensor(Rng& rng, Shape shape, bool requires_grad = false,
                        double lo = -1.0, double hi = 1.0) {
  std::vector<T> v(shape_numel(shape));
  for (T& x : v) x = static_cast<T>(rng.uniform(lo, hi));
  return Tensor<T>::from_data(std::move(shape), std::move(v), requires_grad);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("tctn_" + tag + "_" + std::to_string(Rng(std::random_device{}()).next_u64()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace tctn::testing

#endif  // TCTN_TESTS_TEST_UTIL_HPP_
