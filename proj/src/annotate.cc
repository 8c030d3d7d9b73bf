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

#include "tcsaug/annotate.h"

#include <algorithm>
#include <map>
#include <utility>

#include "json.hpp"
#include "tcsaug/error.h"
#include "tcsaug/io.h"
#include "tcsaug/parallel.h"

namespace tcsaug {
namespace {

constexpr size_t kMaxFallbackCandidates = 5;
constexpr size_t kMinTokenLength = 3;

}  // namespace

std::string_view AnnotationMethodName(AnnotationMethod method) {
  return method == AnnotationMethod::kWikifier ? "wikifier" : "fallback";
}

std::optional<AnnotationMethod> ParseAnnotationMethod(std::string_view name) {
  if (name == "wikifier") return AnnotationMethod::kWikifier;
  if (name == "fallback") return AnnotationMethod::kFallback;
  return std::nullopt;
}

const StopwordSet& DefaultStopwords() {
  static const StopwordSet* const kStopwords = new StopwordSet{
      "a",        "about",    "above",   "after",   "again",   "against",
      "all",      "also",     "am",      "an",      "and",     "any",
      "are",      "as",       "at",      "be",      "because", "been",
      "before",   "being",    "below",   "between", "both",    "but",
      "by",       "can",      "could",   "did",     "do",      "does",
      "doing",    "down",     "during",  "each",    "few",     "for",
      "from",     "further",  "had",     "has",     "have",    "having",
      "he",       "her",      "here",    "hers",    "herself", "him",
      "himself",  "his",      "how",     "however", "i",       "if",
      "in",       "into",     "is",      "it",      "its",     "itself",
      "may",      "me",       "more",    "most",    "must",    "my",
      "myself",   "no",       "nor",     "not",     "now",     "of",
      "off",      "on",       "once",    "one",     "only",    "or",
      "other",    "our",      "ours",    "out",     "over",    "own",
      "same",     "she",      "should",  "so",      "some",    "such",
      "than",     "that",     "the",     "their",   "theirs",  "them",
      "then",     "there",    "these",   "they",    "this",    "those",
      "through",  "thus",     "to",      "too",     "two",     "under",
      "until",    "up",       "upon",    "us",      "use",     "used",
      "using",    "very",     "via",     "was",     "we",      "were",
      "what",     "when",     "where",   "whether", "which",   "while",
      "who",      "whom",     "why",     "will",    "with",    "within",
      "without",  "would",    "you",     "your",    "yours",   "paper",
      "propose",  "proposed", "show",    "shows",   "new",     "based",
      "approach", "method",   "methods", "results", "work",    "well",
  };
  return *kStopwords;
}

std::vector<TopicCandidate> FallbackAnnotate(std::string_view text,
                                             const StopwordSet& stopwords) {
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kPrecondition, "cannot annotate empty text");
  }
  struct Tally {
    size_t count = 0;
    size_t first = 0;
  };
  std::map<std::string, Tally, std::less<>> tallies;
  size_t kept = 0;
  for (std::string& token : TokenizeLower(text)) {
    if (token.size() < kMinTokenLength || stopwords.contains(token)) continue;
    auto [it, inserted] = tallies.try_emplace(std::move(token));
    if (inserted) it->second.first = kept;
    ++it->second.count;
    ++kept;
  }
  std::vector<std::pair<std::string, Tally>> ranked(tallies.begin(),
                                                    tallies.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) {
      return a.second.count > b.second.count;
    }
    return a.second.first < b.second.first;
  });
  if (ranked.size() > kMaxFallbackCandidates) {
    ranked.resize(kMaxFallbackCandidates);
  }
  std::vector<TopicCandidate> out;
  out.reserve(ranked.size());
  for (auto& [label, tally] : ranked) {
    out.push_back(TopicCandidate{
        .label = label,
        .confidence =
            static_cast<double>(tally.count) / static_cast<double>(kept),
        .method = AnnotationMethod::kFallback});
  }
  return out;
}

TopicCandidate SelectSalientTopic(
    const std::vector<TopicCandidate>& candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kAnnotationMissing, "no topic candidates");
  }
  const TopicCandidate* best = &candidates.front();
  for (const TopicCandidate& c : candidates) {
    if (c.confidence > best->confidence ||
        (c.confidence == best->confidence && c.label < best->label)) {
      best = &c;
    }
  }
  return *best;
}

std::string AnnotationInput(const CorpusEntry& entry,
                            const ReferenceSummary& summary,
                            AnnotationText mode) {
  switch (mode) {
    case AnnotationText::kAbstractOnly:
      return entry.document.abstract_text;
    case AnnotationText::kSummaryOnly:
      return summary.summary_text;
    case AnnotationText::kAbstractAndSummary:
      break;
  }
  return entry.document.abstract_text + " " + summary.summary_text;
}

AnnotationResult AnnotateCorpus(const std::vector<CorpusEntry>& entries,
                                TopicAnnotator& annotator,
                                const AnnotateOptions& options) {
  struct Job {
    const CorpusEntry* entry;
    const ReferenceSummary* summary;
  };
  std::vector<Job> jobs;
  for (const CorpusEntry& entry : entries) {
    for (const ReferenceSummary& summary : entry.summaries) {
      jobs.push_back({&entry, &summary});
    }
  }
  std::vector<std::vector<TopicCandidate>> candidates(jobs.size());
  ParallelFor(jobs.size(), options.workers, [&](size_t i) {
    candidates[i] = annotator.Annotate(
        AnnotationInput(*jobs[i].entry, *jobs[i].summary, options.text));
  });

  AnnotationResult result;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const CorpusEntry& entry = *jobs[i].entry;
    if (candidates[i].empty()) {
      if (options.on_missing == MissingTopicPolicy::kAbort) {
        throw Error(
            ErrorCode::kAnnotationMissing,
            "no topic found for doc_id '" + entry.document.doc_id + "'");
      }
      if (result.skipped.empty() ||
          result.skipped.back() != entry.document.doc_id) {
        result.skipped.push_back(entry.document.doc_id);
      }
      continue;
    }
    result.examples.push_back(
        AnnotatedExample{.doc_id = entry.document.doc_id,
                         .summary_index = jobs[i].summary->summary_index,
                         .abstract_text = entry.document.abstract_text,
                         .topic = SelectSalientTopic(candidates[i]),
                         .summary_text = jobs[i].summary->summary_text});
  }
  return result;
}

std::string SerializeAnnotations(
    const std::vector<AnnotatedExample>& examples) {
  std::string out;
  for (const AnnotatedExample& ex : examples) {
    nlohmann::ordered_json record;
    record["doc_id"] = ex.doc_id;
    record["summary_index"] = ex.summary_index;
    record["abstract"] = ex.abstract_text;
    record["topic"] = ex.topic.label;
    record["topic_confidence"] = ex.topic.confidence;
    record["topic_method"] = AnnotationMethodName(ex.topic.method);
    record["summary"] = ex.summary_text;
    out += DumpJsonLine(record);
    out.push_back('\n');
  }
  return out;
}

void WriteAnnotations(const std::filesystem::path& path,
                      const std::vector<AnnotatedExample>& examples) {
  WriteFileAtomic(path, SerializeAnnotations(examples));
}

std::vector<AnnotatedExample> LoadAnnotations(
    const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  std::vector<AnnotatedExample> out;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const nlohmann::json record = ParseJsonLine(name, line_number, line);
    try {
      AnnotatedExample ex;
      ex.doc_id = record.at("doc_id").get<std::string>();
      ex.summary_index = record.at("summary_index").get<int>();
      ex.abstract_text = record.at("abstract").get<std::string>();
      ex.topic.label = record.at("topic").get<std::string>();
      ex.topic.confidence = record.at("topic_confidence").get<double>();
      const auto method =
          ParseAnnotationMethod(record.at("topic_method").get<std::string>());
      if (!method) throw LineError(name, line_number, "unknown topic_method");
      ex.topic.method = *method;
      ex.summary_text = record.at("summary").get<std::string>();
      if (ex.topic.label.empty() || ex.abstract_text.empty() ||
          ex.summary_text.empty()) {
        throw LineError(name, line_number, "empty topic, abstract or summary");
      }
      if (ex.topic.confidence < 0.0 || ex.topic.confidence > 1.0) {
        throw LineError(name, line_number, "topic_confidence outside [0,1]");
      }
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
  });
  if (out.empty()) {
    throw Error(ErrorCode::kInput, "no annotations in " + name);
  }
  return out;
}

}  // namespace tcsaug
