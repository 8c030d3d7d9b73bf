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

#ifndef TCSAUG_ANNOTATE_H_
#define TCSAUG_ANNOTATE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tcsaug/corpus.h"

namespace tcsaug {

enum class AnnotationMethod { kWikifier, kFallback };

std::string_view AnnotationMethodName(AnnotationMethod method);
std::optional<AnnotationMethod> ParseAnnotationMethod(std::string_view name);

struct TopicCandidate {
  std::string label;
  double confidence = 0.0;  // in [0, 1]
  AnnotationMethod method = AnnotationMethod::kFallback;

  bool operator==(const TopicCandidate&) const = default;
};

// A training triple: abstract, its selected salient topic, and its summary.
struct AnnotatedExample {
  std::string doc_id;
  int summary_index = 0;
  std::string abstract_text;
  TopicCandidate topic;
  std::string summary_text;

  bool operator==(const AnnotatedExample&) const = default;
};

using StopwordSet = std::set<std::string, std::less<>>;

// A common English stopword list.
const StopwordSet& DefaultStopwords();

// Offline topic extraction: tokens shorter than 3 bytes and stopwords are
// dropped, the rest ranked by frequency (desc) then first occurrence (asc).
// Returns at most 5 candidates with confidence = count / kept tokens.
// Throws Error(kPrecondition) on empty text.
std::vector<TopicCandidate> FallbackAnnotate(std::string_view text,
                                             const StopwordSet& stopwords);

// Highest confidence wins; ties go to the lexicographically smallest label.
// Throws Error(kAnnotationMissing) on an empty list.
TopicCandidate SelectSalientTopic(
    const std::vector<TopicCandidate>& candidates);

class TopicAnnotator {
 public:
  virtual ~TopicAnnotator() = default;
  virtual AnnotationMethod method() const = 0;
  // Candidates sorted by confidence descending. May be empty.
  virtual std::vector<TopicCandidate> Annotate(std::string_view text) = 0;
};

class FallbackAnnotator : public TopicAnnotator {
 public:
  explicit FallbackAnnotator(StopwordSet stopwords = DefaultStopwords())
      : stopwords_(std::move(stopwords)) {}

  AnnotationMethod method() const override {
    return AnnotationMethod::kFallback;
  }
  std::vector<TopicCandidate> Annotate(std::string_view text) override {
    return FallbackAnnotate(text, stopwords_);
  }

 private:
  StopwordSet stopwords_;
};

enum class AnnotationText { kAbstractAndSummary, kAbstractOnly, kSummaryOnly };
enum class MissingTopicPolicy { kSkip, kAbort };

struct AnnotateOptions {
  AnnotationText text = AnnotationText::kAbstractAndSummary;
  MissingTopicPolicy on_missing = MissingTopicPolicy::kSkip;
  size_t workers = 1;
};

struct AnnotationResult {
  std::vector<AnnotatedExample> examples;
  // doc_ids excluded because no candidate topic was found.
  std::vector<std::string> skipped;
};

// The text the annotator sees for one (document, summary) pair.
std::string AnnotationInput(const CorpusEntry& entry,
                            const ReferenceSummary& summary,
                            AnnotationText mode);

// One AnnotatedExample per (document, summary) pair, in input order.
// The annotator is called concurrently up to `options.workers`.
AnnotationResult AnnotateCorpus(const std::vector<CorpusEntry>& entries,
                                TopicAnnotator& annotator,
                                const AnnotateOptions& options = {});

// Line-delimited records: doc_id, summary_index, abstract, topic,
// topic_confidence, topic_method, summary.
std::string SerializeAnnotations(const std::vector<AnnotatedExample>& examples);
void WriteAnnotations(const std::filesystem::path& path,
                      const std::vector<AnnotatedExample>& examples);
std::vector<AnnotatedExample> LoadAnnotations(
    const std::filesystem::path& path);

}  // namespace tcsaug

#endif  // TCSAUG_ANNOTATE_H_
