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

#ifndef TCSAUG_EMBED_H_
#define TCSAUG_EMBED_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcsaug {

enum class EmbedderKind { kToy, kFile, kAdapter };

std::string_view EmbedderKindName(EmbedderKind kind);
std::optional<EmbedderKind> ParseEmbedderKind(std::string_view name);

struct EmbeddingVector {
  std::string key;  // content hash of the embedded text
  std::vector<double> values;

  size_t dim() const { return values.size(); }
};

// SHA-256 hex of the text; the key used throughout the embedding protocol.
std::string EmbeddingKey(std::string_view text);

// Signed hashed bag of tokens. Each lowercased token t contributes
// sign(t) to slot index(t), where h = FNV-1a-64(t), index = h mod dim and
// sign = -1 if bit 32 of h is set, else +1. The sum is L2-normalized. A text
// with no tokens maps to the zero vector. Throws Error(kPrecondition) if
// dim < 8.
EmbeddingVector ToyEmbed(std::string_view text, size_t dim);

// Vectors keyed by content hash. Toy stores compute and insert on a miss;
// other stores treat a miss as Error(kMissingEmbedding). Lookups are safe
// from multiple threads.
class EmbeddingStore {
 public:
  static EmbeddingStore Toy(size_t dim);
  // Throws Error(kDimensionMismatch) if any vector's dim differs from `dim`.
  static EmbeddingStore FromVectors(EmbedderKind kind, size_t dim,
                                    std::vector<EmbeddingVector> vectors);

  EmbeddingStore(EmbeddingStore&&) noexcept = default;
  EmbeddingStore& operator=(EmbeddingStore&&) noexcept = default;

  EmbeddingVector Lookup(std::string_view text) const;
  bool Contains(std::string_view text) const;

  EmbedderKind provenance() const { return kind_; }
  size_t dim() const { return dim_; }
  size_t size() const;
  std::vector<EmbeddingVector> Vectors() const;

 private:
  EmbeddingStore(EmbedderKind kind, size_t dim);

  EmbedderKind kind_;
  size_t dim_;
  std::unique_ptr<std::mutex> mutex_;
  mutable std::map<std::string, EmbeddingVector, std::less<>> vectors_;
};

// Reads a response file (`{"key", "dim", "values"}` per line) into a store.
EmbeddingStore LoadEmbeddingFile(const std::filesystem::path& path,
                                 EmbedderKind kind = EmbedderKind::kFile);

struct ExchangeOptions {
  std::filesystem::path dir;
  std::string request_name = "embed_request.jsonl";
  std::string response_name = "embed_response.jsonl";
  // Shell command run after the request is written (e.g. the adapter
  // script). Empty means the response is produced out of band.
  std::string command;
  // How long to wait for the response file to appear.
  std::chrono::milliseconds wait{0};
  std::chrono::milliseconds poll{50};

  std::filesystem::path request_path() const { return dir / request_name; }
  std::filesystem::path response_path() const { return dir / response_name; }
};

// Writes `{"key", "text"}` lines for the distinct texts, then reads and
// validates the response: every requested key answered exactly once, no
// unrequested keys, one shared dim. Missing keys raise
// Error(kMissingEmbedding) listing them; inconsistent dims raise
// Error(kDimensionMismatch).
EmbeddingStore RequestEmbeddings(const std::vector<std::string>& texts,
                                 const ExchangeOptions& options);

}  // namespace tcsaug

#endif  // TCSAUG_EMBED_H_
