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

#ifndef TCSAUG_IO_H_
#define TCSAUG_IO_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tcsaug {

// Lowercase hex SHA-256 of `bytes`.
std::string Sha256Hex(std::string_view bytes);

// 64-bit FNV-1a. Stable across platforms; used wherever a cheap documented
// hash is part of an output contract.
constexpr uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<uint8_t>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);

// Calls `fn(line_number, line)` for every line of `text`. A single trailing
// newline does not produce an extra empty line; a trailing '\r' is stripped.
void ForEachLine(std::string_view text,
                 const std::function<void(size_t, std::string_view)>& fn);

// Parses one JSON object from a line; failures become LineError.
nlohmann::json ParseJsonLine(const std::string& path, size_t line_number,
                             std::string_view line);

// Compact single-line serialization. Invalid UTF-8 is an error.
std::string DumpJsonLine(const nlohmann::ordered_json& record);

// Strips leading/trailing ASCII whitespace.
std::string_view Trim(std::string_view text);

// Lowercases ASCII and splits on runs of characters that are neither ASCII
// alphanumerics nor non-ASCII bytes, so UTF-8 words stay intact.
std::vector<std::string> TokenizeLower(std::string_view text);

}  // namespace tcsaug

#endif  // TCSAUG_IO_H_
