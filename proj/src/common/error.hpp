// Copyright 2026 The Medex Authors.
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

#ifndef MEDEX_COMMON_ERROR_HPP_
#define MEDEX_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace medex {

// Error categories. The numeric values are shared with the C API status
// codes in medex.h.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIo = 2,
  kParse = 3,
  kValidation = 4,
  kChecksum = 5,
  kVersion = 6,
  kShapeMismatch = 7,
  kNumeric = 8,
  kInternal = 100,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace medex

#endif  // MEDEX_COMMON_ERROR_HPP_
