// Copyright 2026 The tcsaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TCSAUG_ERROR_H_
#define TCSAUG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcsaug {

// Broad failure classes. The CLI maps these onto distinct exit codes.
enum class ErrorCode {
  kConfig,
  kInput,
  kStructure,
  kPrecondition,
  kRange,
  kTransport,
  kService,
  kAnnotationMissing,
  kMissingEmbedding,
  kDimensionMismatch,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Error raised while parsing a line-delimited file; carries the 1-based line.
class LineError : public Error {
 public:
  LineError(const std::string& path, size_t line, const std::string& message)
      : Error(ErrorCode::kInput,
              path + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace tcsaug

#endif  // TCSAUG_ERROR_H_
