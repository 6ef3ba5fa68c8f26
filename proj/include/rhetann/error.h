// Copyright 2026 The RhetAnn Authors.
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

#ifndef RHETANN_ERROR_H_
#define RHETANN_ERROR_H_

#include <stdexcept>
#include <string>

namespace rhetann {

// Broad failure classes. The CLI maps these onto process exit codes and the
// server onto HTTP statuses.
enum class ErrorCode {
  kInvalidArgument,    // caller violated a precondition
  kNotFound,           // unknown id
  kValidation,         // record failed referential or membership checks
  kData,               // malformed input document
  kTransport,          // LLM transport exhausted after retries
  kAuth,               // LLM endpoint rejected the credentials
  kContextOverflow,    // prompt exceeds the model context window
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline Error InvalidArgument(const std::string& m) {
  return Error(ErrorCode::kInvalidArgument, m);
}
inline Error NotFound(const std::string& m) {
  return Error(ErrorCode::kNotFound, m);
}
inline Error ValidationError(const std::string& m) {
  return Error(ErrorCode::kValidation, m);
}
inline Error DataError(const std::string& m) {
  return Error(ErrorCode::kData, m);
}

}  // namespace rhetann

#endif  // RHETANN_ERROR_H_
