// Copyright 2026 The numur Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NUMUR_ERROR_HPP_
#define NUMUR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace numur {

// Error categories surfaced by the CLI as `ERROR:<code>:`.
enum class ErrorCode {
  kParse,
  kDanglingRef,
  kDuplicate,
  kInvariant,
  kInfeasible,
  kInvalidArgument,
  kIo,
  kNotFound,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace numur

#endif  // NUMUR_ERROR_HPP_
