// Copyright 2026 The Tempo Authors.
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

#ifndef TEMPO_CORE_ERROR_HPP_
#define TEMPO_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tempo {

// Categories map one-to-one onto C API status codes and CLI exit codes.
enum class ErrorCode {
  kInvalidArgument = 1,
  kConfigParse = 2,
  kMissingFile = 3,
  kShapeMismatch = 4,
  kSizeLimit = 5,
  kNumeric = 6,
  kParse = 7,
  kCycle = 8,
  kIo = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tempo

#endif  // TEMPO_CORE_ERROR_HPP_
