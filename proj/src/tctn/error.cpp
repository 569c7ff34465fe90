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

#include "tctn/error.hpp"

namespace tctn {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kNumeric: return "numeric";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kLength: return "length";
    case ErrorCode::kIO: return "io";
    case ErrorCode::kData: return "data";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kInvalidOracle: return "invalid_oracle";
  }
  return "unknown";
}

}  // namespace tctn
