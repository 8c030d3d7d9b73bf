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

#include "tcsaug/config.h"

#include <cstdlib>
#include <initializer_list>
#include <string_view>

#include "tcsaug/error.h"
#include "tcsaug/io.h"

namespace tcsaug {
namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& node, std::string name)
      : node_(node), name_(std::move(name)) {
    if (!node_.is_object()) Fail("must be an object");
  }

  void AllowOnly(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (const std::string_view k : keys) known = known || k == key;
      if (!known) Fail("unknown key '" + key + "'");
    }
  }

  bool Has(const std::string& key) const {
    return node_.contains(key) && !node_[key].is_null();
  }

  template <typename T>
  void Read(const std::string& key, T& out) const {
    if (!Has(key)) return;
    try {
      out = node_[key].get<T>();
    } catch (const json::exception&) {
      Fail("key '" + key + "' has the wrong type");
    }
  }

  std::optional<std::string> String(const std::string& key) const {
    if (!Has(key)) return std::nullopt;
    std::string value;
    Read(key, value);
    return value;
  }

  Section Child(const std::string& key) const {
    return Section(Has(key) ? node_[key] : Empty(), name_ + "." + key);
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw Error(ErrorCode::kConfig, "config " + name_ + ": " + message);
  }

 private:
  static const json& Empty() {
    static const json* const kEmpty = new json(json::object());
    return *kEmpty;
  }

  const json& node_;
  std::string name_;
};

AnnotationText ParseAnnotationText(const Section& section,
                                   const std::string& key,
                                   AnnotationText fallback) {
  const auto value = section.String(key);
  if (!value) return fallback;
  if (*value == "abstract_and_summary") {
    return AnnotationText::kAbstractAndSummary;
  }
  if (*value == "abstract") return AnnotationText::kAbstractOnly;
  if (*value == "summary") return AnnotationText::kSummaryOnly;
  section.Fail("'" + key +
               "' must be abstract_and_summary, abstract or summary");
}

}  // namespace

std::filesystem::path PipelineConfig::NormalizedCorpusPath(Split split) const {
  return work_dir / "corpus" / (std::string(SplitName(split)) + ".jsonl");
}
std::filesystem::path PipelineConfig::StatsPath() const {
  return work_dir / "corpus" / "stats.json";
}
std::filesystem::path PipelineConfig::AnnotationsPath() const {
  return work_dir / "annotations" / "train.jsonl";
}
std::filesystem::path PipelineConfig::TestRecordsPath() const {
  return work_dir / "annotations" / "test_records.jsonl";
}
std::filesystem::path PipelineConfig::DatasetDir() const {
  return work_dir / "datasets";
}
std::filesystem::path PipelineConfig::ReportDir() const {
  return work_dir / "reports";
}

WikifierConfig PipelineConfig::ResolveWikifier() const {
  WikifierConfig out;
  out.endpoint = wikifier.endpoint;
  if (const char* key = std::getenv(wikifier.credential_env.c_str())) {
    out.credential = key;
  }
  out.language = wikifier.language;
  out.ranking_field = wikifier.ranking_field;
  out.page_rank_sq_threshold = wikifier.page_rank_sq_threshold;
  out.timeout = std::chrono::milliseconds(wikifier.timeout_ms);
  out.max_retries = wikifier.max_retries;
  out.retry_backoff = std::chrono::milliseconds(wikifier.retry_backoff_ms);
  return out;
}

ExchangeOptions PipelineConfig::Exchange() const {
  ExchangeOptions out;
  out.dir = exchange_dir;
  out.command = adapter_command;
  out.wait = std::chrono::milliseconds(adapter_wait_ms);
  return out;
}

PipelineConfig ParseConfig(const json& root,
                           const std::filesystem::path& base_dir) {
  const Section top(root, "root");
  top.AllowOnly({"work_dir", "workers", "corpus", "annotate", "augment",
                 "embed", "eval"});
  PipelineConfig c;
  c.base_dir = base_dir;
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  c.work_dir = resolve(top.String("work_dir").value_or("out"));
  top.Read("workers", c.workers);
  if (c.workers == 0) top.Fail("workers must be >= 1");

  const Section corpus = top.Child("corpus");
  corpus.AllowOnly({"train", "validation", "test", "fields"});
  for (const Split split : {Split::kTrain, Split::kValidation, Split::kTest}) {
    if (auto p = corpus.String(std::string(SplitName(split)))) {
      c.corpus[split] = resolve(*p);
    }
  }
  const Section fields = corpus.Child("fields");
  fields.AllowOnly({"id", "source", "target"});
  fields.Read("id", c.fields.id);
  fields.Read("source", c.fields.source);
  fields.Read("target", c.fields.target);

  const Section annotate = top.Child("annotate");
  annotate.AllowOnly({"method", "text", "test_text", "on_missing", "cache_dir",
                      "stopwords", "wikifier"});
  if (auto m = annotate.String("method")) {
    const auto method = ParseAnnotationMethod(*m);
    if (!method) annotate.Fail("method must be wikifier or fallback");
    c.method = *method;
  }
  c.train_text = ParseAnnotationText(annotate, "text", c.train_text);
  c.test_text = ParseAnnotationText(annotate, "test_text", c.test_text);
  if (auto m = annotate.String("on_missing")) {
    if (*m == "skip") {
      c.on_missing = MissingTopicPolicy::kSkip;
    } else if (*m == "abort") {
      c.on_missing = MissingTopicPolicy::kAbort;
    } else {
      annotate.Fail("on_missing must be skip or abort");
    }
  }
  c.cache_dir =
      resolve(annotate.String("cache_dir").value_or("cache/wikifier"));
  if (auto p = annotate.String("stopwords")) c.stopwords_file = resolve(*p);
  const Section wiki = annotate.Child("wikifier");
  if (wiki.Has("credential") || wiki.Has("user_key")) {
    wiki.Fail("credentials must be referenced via credential_env, not inline");
  }
  wiki.AllowOnly({"endpoint", "credential_env", "language", "ranking_field",
                  "page_rank_sq_threshold", "timeout_ms", "max_retries",
                  "retry_backoff_ms"});
  wiki.Read("endpoint", c.wikifier.endpoint);
  wiki.Read("credential_env", c.wikifier.credential_env);
  wiki.Read("language", c.wikifier.language);
  wiki.Read("ranking_field", c.wikifier.ranking_field);
  wiki.Read("page_rank_sq_threshold", c.wikifier.page_rank_sq_threshold);
  wiki.Read("timeout_ms", c.wikifier.timeout_ms);
  wiki.Read("max_retries", c.wikifier.max_retries);
  wiki.Read("retry_backoff_ms", c.wikifier.retry_backoff_ms);

  const Section augment = top.Child("augment");
  augment.AllowOnly({"seed", "multiplier", "xx", "separator", "baseline"});
  augment.Read("seed", c.seed);
  augment.Read("multiplier", c.multiplier);
  augment.Read("xx", c.xx);
  augment.Read("separator", c.separator);
  augment.Read("baseline", c.baseline);
  if (c.multiplier < 1) augment.Fail("multiplier must be >= 1");

  const Section embed = top.Child("embed");
  embed.AllowOnly(
      {"kind", "dim", "exchange_dir", "adapter_command", "wait_ms", "file"});
  if (auto k = embed.String("kind")) {
    const auto kind = ParseEmbedderKind(*k);
    if (!kind) embed.Fail("kind must be toy, file or adapter");
    c.embedder = *kind;
  }
  embed.Read("dim", c.dim);
  c.exchange_dir = resolve(embed.String("exchange_dir").value_or("exchange"));
  embed.Read("adapter_command", c.adapter_command);
  embed.Read("wait_ms", c.adapter_wait_ms);
  if (auto p = embed.String("file")) c.embedding_file = resolve(*p);
  if (c.embedder == EmbedderKind::kFile && !c.embedding_file) {
    embed.Fail("kind 'file' needs 'file'");
  }

  const Section eval = top.Child("eval");
  eval.AllowOnly({"alternative", "model_outputs", "external_scores"});
  if (auto a = eval.String("alternative")) {
    const auto mode = ParseAlternativeMode(*a);
    if (!mode) eval.Fail("alternative must be cyclic_next or best_of_rest");
    c.alternative_mode = *mode;
  }
  if (auto p = eval.String("model_outputs")) c.model_outputs = resolve(*p);
  if (auto p = eval.String("external_scores")) c.external_scores = resolve(*p);
  return c;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "config file not found: " + path.string());
  }
  json root;
  try {
    root = json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig,
                "cannot parse config " + path.string() + ": " + e.what());
  }
  return ParseConfig(root, std::filesystem::absolute(path).parent_path());
}

StopwordSet LoadStopwords(const std::filesystem::path& path) {
  StopwordSet out;
  ForEachLine(ReadFile(path), [&](size_t, std::string_view line) {
    const std::string_view word = Trim(line);
    if (word.empty() || word.front() == '#') return;
    out.emplace(word);
  });
  return out;
}

}  // namespace tcsaug
