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

#ifndef TCSAUG_CONFIG_H_
#define TCSAUG_CONFIG_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "tcsaug/annotate.h"
#include "tcsaug/corpus.h"
#include "tcsaug/embed.h"
#include "tcsaug/eval.h"
#include "tcsaug/wikifier.h"

namespace tcsaug {

struct WikifierSettings {
  std::string endpoint = "http://www.wikifier.org/annotate-article";
  // Name of the environment variable holding the API key.
  std::string credential_env = "WIKIFIER_USER_KEY";
  std::string language = "en";
  std::string ranking_field = "pageRank";
  double page_rank_sq_threshold = 0.8;
  int timeout_ms = 10000;
  int max_retries = 2;
  int retry_backoff_ms = 500;
};

// One experiment, described by a single JSON file. Relative paths are
// resolved against the directory of the config file.
struct PipelineConfig {
  std::filesystem::path base_dir;
  std::filesystem::path work_dir;
  size_t workers = 1;

  std::map<Split, std::filesystem::path> corpus;
  FieldMapping fields;

  AnnotationMethod method = AnnotationMethod::kFallback;
  AnnotationText train_text = AnnotationText::kAbstractAndSummary;
  AnnotationText test_text = AnnotationText::kSummaryOnly;
  MissingTopicPolicy on_missing = MissingTopicPolicy::kSkip;
  std::filesystem::path cache_dir;
  std::optional<std::filesystem::path> stopwords_file;
  WikifierSettings wikifier;

  uint64_t seed = 13;
  int multiplier = 1;
  bool xx = false;
  std::string separator = " ";
  bool baseline = false;

  EmbedderKind embedder = EmbedderKind::kToy;
  size_t dim = 256;
  std::filesystem::path exchange_dir;
  std::string adapter_command;
  int adapter_wait_ms = 0;
  std::optional<std::filesystem::path> embedding_file;

  AlternativeMode alternative_mode = AlternativeMode::kCyclicNext;
  std::optional<std::filesystem::path> model_outputs;
  std::optional<std::filesystem::path> external_scores;

  std::filesystem::path NormalizedCorpusPath(Split split) const;
  std::filesystem::path StatsPath() const;
  std::filesystem::path AnnotationsPath() const;
  std::filesystem::path TestRecordsPath() const;
  std::filesystem::path DatasetDir() const;
  std::filesystem::path ReportDir() const;

  WikifierConfig ResolveWikifier() const;
  ExchangeOptions Exchange() const;
};

// Throws Error(kConfig) on unknown keys, wrong types, bad enum values, or an
// inline credential.
PipelineConfig ParseConfig(const nlohmann::json& root,
                           const std::filesystem::path& base_dir);
PipelineConfig LoadConfig(const std::filesystem::path& path);

// Reads one stopword per line; blank lines and '#' comments are ignored.
StopwordSet LoadStopwords(const std::filesystem::path& path);

}  // namespace tcsaug

#endif  // TCSAUG_CONFIG_H_
