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

#include "tcsaug/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "tcsaug/error.h"
#include "tcsaug/io.h"
#include "tcsaug/parallel.h"

namespace tcsaug {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kCosineSlack = 1e-9;

json WithoutSeed(json config) {
  if (config.is_object()) config.erase("seed");
  return config;
}

}  // namespace

std::vector<TestRecord> AnnotateTestRecords(
    const std::vector<CorpusEntry>& entries, TopicAnnotator& annotator,
    AnnotationText text, size_t workers) {
  AnnotateOptions options{.text = text,
                          .on_missing = MissingTopicPolicy::kSkip,
                          .workers = workers};
  const AnnotationResult annotated =
      AnnotateCorpus(entries, annotator, options);
  std::vector<TestRecord> records;
  records.reserve(entries.size());
  size_t next = 0;
  for (const CorpusEntry& entry : entries) {
    TestRecord record{.record_id = entry.document.doc_id,
                      .abstract_text = entry.document.abstract_text,
                      .targets = {}};
    while (next < annotated.examples.size() &&
           annotated.examples[next].doc_id == entry.document.doc_id) {
      const AnnotatedExample& ex = annotated.examples[next++];
      record.targets.push_back(
          TestTarget{.target_index = static_cast<size_t>(ex.summary_index),
                     .summary_text = ex.summary_text,
                     .topic_label = ex.topic.label});
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string SerializeTestRecords(const std::vector<TestRecord>& records) {
  std::string out;
  for (const TestRecord& record : records) {
    ordered_json line;
    line["record_id"] = record.record_id;
    line["abstract"] = record.abstract_text;
    ordered_json targets = ordered_json::array();
    for (const TestTarget& t : record.targets) {
      ordered_json target;
      target["target_index"] = t.target_index;
      target["summary"] = t.summary_text;
      target["topic"] = t.topic_label;
      targets.push_back(std::move(target));
    }
    line["targets"] = std::move(targets);
    out += DumpJsonLine(line);
    out.push_back('\n');
  }
  return out;
}

void WriteTestRecords(const std::filesystem::path& path,
                      const std::vector<TestRecord>& records) {
  WriteFileAtomic(path, SerializeTestRecords(records));
}

std::vector<TestRecord> LoadTestRecords(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  std::vector<TestRecord> records;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const json record = ParseJsonLine(name, line_number, line);
    try {
      TestRecord r;
      r.record_id = record.at("record_id").get<std::string>();
      r.abstract_text = record.at("abstract").get<std::string>();
      for (const json& t : record.at("targets")) {
        r.targets.push_back(
            TestTarget{.target_index = t.at("target_index").get<size_t>(),
                       .summary_text = t.at("summary").get<std::string>(),
                       .topic_label = t.at("topic").get<std::string>()});
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
  });
  return records;
}

std::string_view AlternativeModeName(AlternativeMode mode) {
  return mode == AlternativeMode::kBestOfRest ? "best_of_rest" : "cyclic_next";
}

std::optional<AlternativeMode> ParseAlternativeMode(std::string_view name) {
  if (name == "cyclic_next") return AlternativeMode::kCyclicNext;
  if (name == "best_of_rest") return AlternativeMode::kBestOfRest;
  return std::nullopt;
}

Expansion ExpandTestRecords(const std::vector<TestRecord>& records) {
  Expansion out;
  for (const TestRecord& record : records) {
    const std::vector<TestTarget>& targets = record.targets;
    const size_t n = targets.size();
    const std::set<std::string_view> distinct = [&] {
      std::set<std::string_view> s;
      for (const TestTarget& t : targets) s.insert(t.topic_label);
      return s;
    }();
    if (distinct.size() < 2) {
      out.skipped_records.push_back(record.record_id);
      continue;
    }
    for (size_t m = 0; m < n; ++m) {
      const std::string& intended = targets[m].topic_label;
      EvalTemplate tmpl{.record_id = record.record_id,
                        .target_index = targets[m].target_index,
                        .intended_topic = intended,
                        .alternative_topic = {},
                        .other_topics = {}};
      for (size_t step = 1; step < n; ++step) {
        const std::string& topic = targets[(m + step) % n].topic_label;
        if (topic == intended) continue;
        if (std::find(tmpl.other_topics.begin(), tmpl.other_topics.end(),
                      topic) == tmpl.other_topics.end()) {
          tmpl.other_topics.push_back(topic);
        }
      }
      tmpl.alternative_topic = tmpl.other_topics.front();
      out.templates.push_back(std::move(tmpl));
    }
  }
  return out;
}

std::string InstanceId(std::string_view record_id, size_t target_index) {
  return std::string(record_id) + "#" + std::to_string(target_index);
}

std::vector<ModelOutput> LoadModelOutputs(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput,
                "model output file not found: " + path.string());
  }
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  std::vector<ModelOutput> out;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const json record = ParseJsonLine(name, line_number, line);
    try {
      out.push_back(
          ModelOutput{.record_id = record.at("record_id").get<std::string>(),
                      .target_index = record.at("target_index").get<size_t>(),
                      .generated_summary =
                          record.at("generated_summary").get<std::string>()});
    } catch (const json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
  });
  return out;
}

std::vector<EvalInstance> JoinModelOutputs(
    const std::vector<TestRecord>& records, const Expansion& expansion,
    const std::vector<ModelOutput>& outputs, AlternativeMode mode,
    const EmbeddingStore* store) {
  if (mode == AlternativeMode::kBestOfRest && store == nullptr) {
    throw Error(ErrorCode::kPrecondition,
                "best-of-rest alternatives need an embedding store");
  }
  std::set<std::string> valid_keys;
  for (const TestRecord& record : records) {
    for (const TestTarget& t : record.targets) {
      valid_keys.insert(InstanceId(record.record_id, t.target_index));
    }
  }
  std::map<std::string, const ModelOutput*> by_key;
  std::vector<std::string> unknown;
  std::vector<std::string> duplicated;
  for (const ModelOutput& output : outputs) {
    std::string key = InstanceId(output.record_id, output.target_index);
    if (!valid_keys.contains(key)) {
      unknown.push_back(std::move(key));
    } else if (!by_key.emplace(key, &output).second) {
      duplicated.push_back(std::move(key));
    }
  }
  std::vector<std::string> missing;
  for (const EvalTemplate& tmpl : expansion.templates) {
    const std::string key = InstanceId(tmpl.record_id, tmpl.target_index);
    if (!by_key.contains(key)) missing.push_back(key);
  }
  auto join = [](const std::vector<std::string>& keys) {
    std::string s;
    for (const std::string& k : keys) s += (s.empty() ? "" : ", ") + k;
    return s;
  };
  if (!unknown.empty()) {
    throw Error(ErrorCode::kInput,
                "model outputs match no test target: " + join(unknown));
  }
  if (!duplicated.empty()) {
    throw Error(ErrorCode::kInput,
                "duplicate model outputs: " + join(duplicated));
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kInput,
                "no model output for instances: " + join(missing));
  }

  std::vector<EvalInstance> instances;
  instances.reserve(expansion.templates.size());
  for (const EvalTemplate& tmpl : expansion.templates) {
    const ModelOutput& output =
        *by_key.at(InstanceId(tmpl.record_id, tmpl.target_index));
    EvalInstance instance{.record_id = tmpl.record_id,
                          .target_index = tmpl.target_index,
                          .generated_summary = output.generated_summary,
                          .intended_topic = tmpl.intended_topic,
                          .alternative_topic = tmpl.alternative_topic};
    if (mode == AlternativeMode::kBestOfRest) {
      const EmbeddingVector summary = store->Lookup(instance.generated_summary);
      double best = -2.0;
      for (const std::string& topic : tmpl.other_topics) {
        const double sim = Cosine(summary, store->Lookup(topic));
        if (sim > best) {
          best = sim;
          instance.alternative_topic = topic;
        }
      }
    }
    instances.push_back(std::move(instance));
  }
  return instances;
}

double Cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.dim() != v.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine of vectors with dims " + std::to_string(u.dim()) +
                    " and " + std::to_string(v.dim()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (size_t i = 0; i < u.dim(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw Error(
        ErrorCode::kPrecondition,
        "cosine of a zero vector (key " + (uu == 0.0 ? u.key : v.key) + ")");
  }
  const double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  if (c > 1.0 + kCosineSlack || c < -1.0 - kCosineSlack) {
    throw Error(ErrorCode::kRange, "cosine out of range: " + std::to_string(c));
  }
  return std::clamp(c, -1.0, 1.0);
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return "win";
    case Outcome::kTie:
      return "tie";
    case Outcome::kLoss:
      return "loss";
  }
  return "unknown";
}

Outcome ScoreInstance(const EvalInstance& instance,
                      const EmbeddingStore& store) {
  if (instance.intended_topic == instance.alternative_topic) {
    throw Error(ErrorCode::kPrecondition,
                "intended and alternative topics are identical for " +
                    InstanceId(instance.record_id, instance.target_index));
  }
  const EmbeddingVector summary = store.Lookup(instance.generated_summary);
  const double intended =
      Cosine(summary, store.Lookup(instance.intended_topic));
  const double alternative =
      Cosine(summary, store.Lookup(instance.alternative_topic));
  if (intended > alternative) return Outcome::kWin;
  if (intended == alternative) return Outcome::kTie;
  return Outcome::kLoss;
}

OutcomeCounts& OutcomeCounts::operator+=(const OutcomeCounts& other) {
  wins += other.wins;
  ties += other.ties;
  losses += other.losses;
  return *this;
}

OutcomeCounts CountOutcomes(std::span<const EvalInstance> instances,
                            const EmbeddingStore& store, size_t workers) {
  std::vector<Outcome> outcomes(instances.size());
  ParallelFor(instances.size(), workers, [&](size_t i) {
    outcomes[i] = ScoreInstance(instances[i], store);
  });
  OutcomeCounts counts;
  for (const Outcome o : outcomes) {
    switch (o) {
      case Outcome::kWin:
        ++counts.wins;
        break;
      case Outcome::kTie:
        ++counts.ties;
        break;
      case Outcome::kLoss:
        ++counts.losses;
        break;
    }
  }
  return counts;
}

WinRateReport WinRate(std::span<const EvalInstance> instances,
                      const EmbeddingStore& store, size_t workers) {
  if (instances.empty()) {
    throw Error(ErrorCode::kPrecondition, "no evaluation instances");
  }
  const OutcomeCounts counts = CountOutcomes(instances, store, workers);
  WinRateReport report;
  report.wins = counts.wins;
  report.ties = counts.ties;
  report.losses = counts.losses;
  report.total = counts.total();
  report.win_rate_percent = 100.0 * static_cast<double>(counts.wins) /
                            static_cast<double>(counts.total());
  report.embedder = std::string(EmbedderKindName(store.provenance()));
  report.embedding_dim = store.dim();
  return report;
}

std::string SerializeReport(const WinRateReport& report) {
  ordered_json out;
  out["wins"] = report.wins;
  out["ties"] = report.ties;
  out["losses"] = report.losses;
  out["total"] = report.total;
  out["win_rate_percent"] = report.win_rate_percent;
  out["embedder"] = report.embedder;
  out["embedding_dim"] = report.embedding_dim;
  out["alternative_mode"] = report.alternative_mode;
  out["skipped_records"] = report.skipped_records;
  out["config"] = report.config;
  if (report.external_score_mean) {
    out["external_score_mean"] = *report.external_score_mean;
  } else {
    out["external_score_mean"] = nullptr;
  }
  return out.dump(2) + "\n";
}

WinRateReport LoadReport(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput, "report not found: " + path.string());
  }
  try {
    const json in = json::parse(ReadFile(path));
    WinRateReport r;
    r.wins = in.at("wins").get<size_t>();
    r.ties = in.at("ties").get<size_t>();
    r.losses = in.at("losses").get<size_t>();
    r.total = in.at("total").get<size_t>();
    r.win_rate_percent = in.at("win_rate_percent").get<double>();
    r.embedder = in.at("embedder").get<std::string>();
    r.embedding_dim = in.at("embedding_dim").get<size_t>();
    r.alternative_mode = in.at("alternative_mode").get<std::string>();
    r.skipped_records = in.at("skipped_records").get<size_t>();
    r.config = in.at("config");
    if (in.contains("external_score_mean") &&
        !in["external_score_mean"].is_null()) {
      r.external_score_mean = in["external_score_mean"].get<double>();
    }
    if (r.wins + r.ties + r.losses != r.total) {
      throw Error(ErrorCode::kInput,
                  "report counts do not sum to total: " + path.string());
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInput,
                "bad report " + path.string() + ": " + e.what());
  }
}

RunAggregate AggregateValues(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kPrecondition, "nothing to aggregate");
  }
  RunAggregate out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
  }
  out.runs = std::move(values);
  return out;
}

RunAggregate AggregateRuns(const std::vector<WinRateReport>& reports) {
  if (reports.empty()) {
    throw Error(ErrorCode::kPrecondition, "no reports to aggregate");
  }
  const json reference = WithoutSeed(reports.front().config);
  std::vector<double> values;
  for (const WinRateReport& r : reports) {
    if (WithoutSeed(r.config) != reference ||
        r.embedder != reports.front().embedder ||
        r.alternative_mode != reports.front().alternative_mode) {
      throw Error(ErrorCode::kConfig,
                  "reports differ in configuration beyond the seed: " +
                      reference.dump() + " vs " + WithoutSeed(r.config).dump());
    }
    values.push_back(r.win_rate_percent);
  }
  return AggregateValues(std::move(values));
}

ScoreTable IngestExternalScores(const std::filesystem::path& path,
                                const std::set<std::string>* known_ids) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput, "score file not found: " + path.string());
  }
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  ScoreTable table;
  double sum = 0.0;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const json record = ParseJsonLine(name, line_number, line);
    std::string id;
    double score = 0.0;
    try {
      id = record.at("example_id").get<std::string>();
      score = record.at("score").get<double>();
    } catch (const json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorCode::kRange, name + ":" + std::to_string(line_number) +
                                         ": score " + std::to_string(score) +
                                         " outside [0, 1]");
    }
    if (known_ids != nullptr && !known_ids->contains(id)) {
      throw LineError(name, line_number, "unknown example_id '" + id + "'");
    }
    if (!table.scores.emplace(id, score).second) {
      throw LineError(name, line_number, "duplicate example_id '" + id + "'");
    }
    sum += score;
  });
  if (table.scores.empty()) {
    throw Error(ErrorCode::kInput, "empty score file " + name);
  }
  table.mean = sum / static_cast<double>(table.scores.size());
  return table;
}

}  // namespace tcsaug
