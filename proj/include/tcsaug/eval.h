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

#ifndef TCSAUG_EVAL_H_
#define TCSAUG_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tcsaug/annotate.h"
#include "tcsaug/corpus.h"
#include "tcsaug/embed.h"

namespace tcsaug {

struct TestTarget {
  size_t target_index = 0;  // summary index in the source record
  std::string summary_text;
  std::string topic_label;
};

// A test document with several reference summaries, each with its topic.
struct TestRecord {
  std::string record_id;
  std::string abstract_text;
  std::vector<TestTarget> targets;
};

// Builds test records from the test split: every summary is annotated on
// its own text (or per `options.text`) and labelled with its salient
// topic. Summaries with no candidate topic are dropped from the record.
std::vector<TestRecord> AnnotateTestRecords(
    const std::vector<CorpusEntry>& entries, TopicAnnotator& annotator,
    AnnotationText text = AnnotationText::kSummaryOnly, size_t workers = 1);

std::string SerializeTestRecords(const std::vector<TestRecord>& records);
void WriteTestRecords(const std::filesystem::path& path,
                      const std::vector<TestRecord>& records);
std::vector<TestRecord> LoadTestRecords(const std::filesystem::path& path);

enum class AlternativeMode { kCyclicNext, kBestOfRest };

std::string_view AlternativeModeName(AlternativeMode mode);
std::optional<AlternativeMode> ParseAlternativeMode(std::string_view name);

// An instance awaiting its generated summary.
struct EvalTemplate {
  std::string record_id;
  size_t target_index = 0;
  std::string intended_topic;
  // Cyclic-next distinct topic.
  std::string alternative_topic;
  // All distinct topics of the record other than the intended one, in
  // cyclic order starting after the target; used by best-of-rest.
  std::vector<std::string> other_topics;
};

struct Expansion {
  std::vector<EvalTemplate> templates;
  std::vector<std::string> skipped_records;
};

// One template per target. The alternative is the first topic found
// walking forward cyclically from the target that differs from its own.
// Records with fewer than two distinct topics are skipped.
Expansion ExpandTestRecords(const std::vector<TestRecord>& records);

struct EvalInstance {
  std::string record_id;
  size_t target_index = 0;
  std::string generated_summary;
  std::string intended_topic;
  std::string alternative_topic;
};

std::string InstanceId(std::string_view record_id, size_t target_index);

struct ModelOutput {
  std::string record_id;
  size_t target_index = 0;
  std::string generated_summary;
};

// Line-delimited `{record_id, target_index, generated_summary}`.
std::vector<ModelOutput> LoadModelOutputs(const std::filesystem::path& path);

// Joins outputs onto templates by (record_id, target_index). An output whose
// key does not name a target of any test record, a duplicated output key,
// or a template without an output is Error(kInput) naming the keys. Outputs
// for skipped records are ignored. In best-of-rest mode the alternative is
// the other topic most similar to the generated summary (first on ties).
std::vector<EvalInstance> JoinModelOutputs(
    const std::vector<TestRecord>& records, const Expansion& expansion,
    const std::vector<ModelOutput>& outputs, AlternativeMode mode,
    const EmbeddingStore* store);

// dot(u, v) / (|u| |v|) clamped to [-1, 1]. Throws Error(kDimensionMismatch)
// for unequal dims and Error(kPrecondition) for a zero vector.
double Cosine(const EmbeddingVector& u, const EmbeddingVector& v);

enum class Outcome { kWin, kTie, kLoss };

std::string_view OutcomeName(Outcome outcome);

// Win iff cos(s, t) > cos(s, t') exactly; tie iff equal. Throws
// Error(kPrecondition) when intended and alternative topics are equal.
Outcome ScoreInstance(const EvalInstance& instance,
                      const EmbeddingStore& store);

struct OutcomeCounts {
  size_t wins = 0;
  size_t ties = 0;
  size_t losses = 0;

  size_t total() const { return wins + ties + losses; }
  OutcomeCounts& operator+=(const OutcomeCounts& other);
  bool operator==(const OutcomeCounts&) const = default;
};

OutcomeCounts CountOutcomes(std::span<const EvalInstance> instances,
                            const EmbeddingStore& store, size_t workers = 1);

struct WinRateReport {
  size_t wins = 0;
  size_t ties = 0;
  size_t losses = 0;
  size_t total = 0;
  double win_rate_percent = 0.0;
  std::string embedder;  // provenance: toy, file or adapter
  size_t embedding_dim = 0;
  std::string alternative_mode = "cyclic_next";
  size_t skipped_records = 0;
  // Run configuration; runs are comparable when these match except "seed".
  nlohmann::json config = nlohmann::json::object();
  std::optional<double> external_score_mean;
};

// Ties are not wins. Throws Error(kPrecondition) on an empty list.
WinRateReport WinRate(std::span<const EvalInstance> instances,
                      const EmbeddingStore& store, size_t workers = 1);

std::string SerializeReport(const WinRateReport& report);
WinRateReport LoadReport(const std::filesystem::path& path);

struct RunAggregate {
  std::vector<double> runs;
  double mean = 0.0;
  // Sample standard deviation (n - 1); absent for a single run.
  std::optional<double> stddev;
};

RunAggregate AggregateValues(std::vector<double> values);

// Aggregates win_rate_percent. Throws Error(kConfig) if the reports' config
// echoes differ in anything but "seed", or Error(kPrecondition) if empty.
RunAggregate AggregateRuns(const std::vector<WinRateReport>& reports);

struct ScoreTable {
  std::map<std::string, double> scores;
  double mean = 0.0;
};

// Line-delimited `{example_id, score}` with scores in [0, 1]. When
// `known_ids` is given, any other example_id is Error(kInput).
ScoreTable IngestExternalScores(const std::filesystem::path& path,
                                const std::set<std::string>* known_ids);

}  // namespace tcsaug

#endif  // TCSAUG_EVAL_H_
