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

#include "tcsaug/embed.h"

#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>
#include <utility>

#include "json.hpp"
#include "tcsaug/error.h"
#include "tcsaug/io.h"

namespace tcsaug {
namespace {

constexpr size_t kMinToyDim = 8;

struct ParsedResponse {
  size_t dim = 0;
  std::vector<EmbeddingVector> vectors;
};

ParsedResponse ParseResponseFile(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  ParsedResponse out;
  std::set<std::string, std::less<>> keys;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const nlohmann::json record = ParseJsonLine(name, line_number, line);
    EmbeddingVector v;
    size_t dim = 0;
    try {
      v.key = record.at("key").get<std::string>();
      dim = record.at("dim").get<size_t>();
      v.values = record.at("values").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
    if (dim == 0 || dim != v.values.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  name + ":" + std::to_string(line_number) + ": key " + v.key +
                      " declares dim " + std::to_string(dim) + " but has " +
                      std::to_string(v.values.size()) + " values");
    }
    if (out.dim == 0) {
      out.dim = dim;
    } else if (dim != out.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  name + ":" + std::to_string(line_number) + ": dim " +
                      std::to_string(dim) + " differs from " +
                      std::to_string(out.dim));
    }
    for (const double x : v.values) {
      if (!std::isfinite(x)) {
        throw LineError(name, line_number, "non-finite value for " + v.key);
      }
    }
    if (!keys.insert(v.key).second) {
      throw LineError(name, line_number, "duplicate key " + v.key);
    }
    out.vectors.push_back(std::move(v));
  });
  if (out.vectors.empty()) {
    throw Error(ErrorCode::kInput, "empty embedding file " + name);
  }
  return out;
}

}  // namespace

std::string_view EmbedderKindName(EmbedderKind kind) {
  switch (kind) {
    case EmbedderKind::kToy:
      return "toy";
    case EmbedderKind::kFile:
      return "file";
    case EmbedderKind::kAdapter:
      return "adapter";
  }
  return "unknown";
}

std::optional<EmbedderKind> ParseEmbedderKind(std::string_view name) {
  if (name == "toy") return EmbedderKind::kToy;
  if (name == "file") return EmbedderKind::kFile;
  if (name == "adapter") return EmbedderKind::kAdapter;
  return std::nullopt;
}

std::string EmbeddingKey(std::string_view text) { return Sha256Hex(text); }

EmbeddingVector ToyEmbed(std::string_view text, size_t dim) {
  if (dim < kMinToyDim) {
    throw Error(ErrorCode::kPrecondition,
                "toy embedding dim must be >= 8, got " + std::to_string(dim));
  }
  EmbeddingVector v{.key = EmbeddingKey(text),
                    .values = std::vector<double>(dim, 0.0)};
  for (const std::string& token : TokenizeLower(text)) {
    const uint64_t h = Fnv1a64(token);
    const double sign = ((h >> 32) & 1) != 0 ? -1.0 : 1.0;
    v.values[h % dim] += sign;
  }
  double norm_sq = 0.0;
  for (const double x : v.values) norm_sq += x * x;
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (double& x : v.values) x /= norm;
  }
  return v;
}

EmbeddingStore::EmbeddingStore(EmbedderKind kind, size_t dim)
    : kind_(kind), dim_(dim), mutex_(std::make_unique<std::mutex>()) {}

EmbeddingStore EmbeddingStore::Toy(size_t dim) {
  if (dim < kMinToyDim) {
    throw Error(ErrorCode::kPrecondition,
                "toy embedding dim must be >= 8, got " + std::to_string(dim));
  }
  return EmbeddingStore(EmbedderKind::kToy, dim);
}

EmbeddingStore EmbeddingStore::FromVectors(
    EmbedderKind kind, size_t dim, std::vector<EmbeddingVector> vectors) {
  EmbeddingStore store(kind, dim);
  for (EmbeddingVector& v : vectors) {
    if (v.dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "vector " + v.key + " has dim " + std::to_string(v.dim()) +
                      ", store dim is " + std::to_string(dim));
    }
    std::string key = v.key;
    store.vectors_.insert_or_assign(std::move(key), std::move(v));
  }
  return store;
}

EmbeddingVector EmbeddingStore::Lookup(std::string_view text) const {
  const std::string key = EmbeddingKey(text);
  {
    std::lock_guard<std::mutex> lock(*mutex_);
    if (auto it = vectors_.find(key); it != vectors_.end()) return it->second;
  }
  if (kind_ != EmbedderKind::kToy) {
    throw Error(ErrorCode::kMissingEmbedding,
                "no " + std::string(EmbedderKindName(kind_)) +
                    " embedding for text hash " + key);
  }
  // Pure function of the text, so concurrent inserts of one key agree.
  EmbeddingVector v = ToyEmbed(text, dim_);
  std::lock_guard<std::mutex> lock(*mutex_);
  vectors_.insert_or_assign(key, v);
  return v;
}

bool EmbeddingStore::Contains(std::string_view text) const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return vectors_.contains(EmbeddingKey(text));
}

size_t EmbeddingStore::size() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  return vectors_.size();
}

std::vector<EmbeddingVector> EmbeddingStore::Vectors() const {
  std::lock_guard<std::mutex> lock(*mutex_);
  std::vector<EmbeddingVector> out;
  out.reserve(vectors_.size());
  for (const auto& [key, v] : vectors_) out.push_back(v);
  return out;
}

EmbeddingStore LoadEmbeddingFile(const std::filesystem::path& path,
                                 EmbedderKind kind) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput,
                "embedding file not found: " + path.string());
  }
  ParsedResponse parsed = ParseResponseFile(path);
  return EmbeddingStore::FromVectors(kind, parsed.dim,
                                     std::move(parsed.vectors));
}

EmbeddingStore RequestEmbeddings(const std::vector<std::string>& texts,
                                 const ExchangeOptions& options) {
  std::vector<std::string> order;
  std::set<std::string, std::less<>> requested;
  std::string request;
  for (const std::string& text : texts) {
    std::string key = EmbeddingKey(text);
    if (!requested.insert(key).second) continue;
    nlohmann::ordered_json record;
    record["key"] = key;
    record["text"] = text;
    request += DumpJsonLine(record);
    request.push_back('\n');
    order.push_back(std::move(key));
  }
  if (order.empty()) {
    throw Error(ErrorCode::kPrecondition, "no texts to embed");
  }
  const std::filesystem::path response_path = options.response_path();
  if (!options.command.empty()) std::filesystem::remove(response_path);
  WriteFileAtomic(options.request_path(), request);

  if (!options.command.empty()) {
    const int status = std::system(options.command.c_str());
    if (status != 0) {
      throw Error(ErrorCode::kService,
                  "embedding adapter command failed with status " +
                      std::to_string(status) + ": " + options.command);
    }
  }
  const auto deadline = std::chrono::steady_clock::now() + options.wait;
  while (!std::filesystem::exists(response_path) &&
         std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(options.poll);
  }
  if (!std::filesystem::exists(response_path)) {
    throw Error(ErrorCode::kInput,
                "no embedding response at " + response_path.string());
  }

  ParsedResponse parsed = ParseResponseFile(response_path);
  std::set<std::string, std::less<>> answered;
  for (const EmbeddingVector& v : parsed.vectors) {
    if (!requested.contains(v.key)) {
      throw Error(ErrorCode::kInput,
                  "embedding response answers unrequested key " + v.key);
    }
    answered.insert(v.key);
  }
  std::string missing;
  for (const std::string& key : order) {
    if (answered.contains(key)) continue;
    if (!missing.empty()) missing += ", ";
    missing += key;
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingEmbedding,
                "embedding response is missing keys: " + missing);
  }
  return EmbeddingStore::FromVectors(EmbedderKind::kAdapter, parsed.dim,
                                     std::move(parsed.vectors));
}

}  // namespace tcsaug
