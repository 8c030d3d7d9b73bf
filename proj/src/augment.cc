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

#include "tcsaug/augment.h"

#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"
#include "tcsaug/error.h"
#include "tcsaug/io.h"
#include "tcsaug/parallel.h"
#include "tcsaug/random.h"

namespace tcsaug {
namespace {

using nlohmann::ordered_json;

DocPair Ordered(size_t a, size_t b) {
  return a < b ? DocPair{a, b} : DocPair{b, a};
}

struct PairKeyLess {
  bool operator()(const DocPair& a, const DocPair& b) const {
    return std::tie(a.first, a.second) < std::tie(b.first, b.second);
  }
};

class RoundBuilder {
 public:
  RoundBuilder(std::span<const std::string> topics,
               const std::set<DocPair, PairKeyLess>* previous)
      : topics_(topics), previous_(previous) {}

  bool Collides(size_t a, size_t b) const {
    return !topics_.empty() && topics_[a] == topics_[b];
  }
  bool Repeats(size_t a, size_t b) const {
    return previous_ != nullptr && previous_->contains(Ordered(a, b));
  }
  bool Bad(size_t a, size_t b) const { return Collides(a, b) || Repeats(a, b); }

 private:
  std::span<const std::string> topics_;
  const std::set<DocPair, PairKeyLess>* previous_;
};

AugmentedExample MakeExample(const AnnotatedExample& target,
                             const AnnotatedExample& first,
                             const AnnotatedExample& second,
                             const std::string& separator, int round,
                             size_t position, bool mirrored) {
  return AugmentedExample{
      .input_text =
          FormatInput(target.topic.label,
                      first.abstract_text + separator + second.abstract_text),
      .target_text = target.summary_text,
      .topic_label = target.topic.label,
      .source_doc_ids = {first.doc_id, second.doc_id},
      .round_index = round,
      .mirrored = mirrored,
      .pair_position = position};
}

}  // namespace

PairingPlan BuildPairingPlan(size_t n_docs, int k, bool xx, uint64_t seed,
                             std::span<const std::string> topics) {
  if (n_docs < 2) {
    throw Error(
        ErrorCode::kPrecondition,
        "pairing needs at least 2 documents, got " + std::to_string(n_docs));
  }
  if (k < 1) {
    throw Error(ErrorCode::kPrecondition,
                "multiplier must be >= 1, got " + std::to_string(k));
  }
  if (!topics.empty() && topics.size() != n_docs) {
    throw Error(ErrorCode::kPrecondition, "topic list size mismatch");
  }

  PairingPlan plan;
  plan.seed = seed;
  plan.multiplier = k;
  plan.xx = xx;
  plan.n_docs = n_docs;
  plan.partner_dedup = n_docs > 2 * static_cast<size_t>(k);

  std::set<DocPair, PairKeyLess> seen;
  const RoundBuilder rules(topics, plan.partner_dedup ? &seen : nullptr);
  std::vector<size_t> perm(n_docs);

  for (int round = 0; round < k; ++round) {
    CounterStream rng(seed, static_cast<uint64_t>(round));
    std::iota(perm.begin(), perm.end(), size_t{0});
    for (size_t i = n_docs - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.Uniform(i + 1)]);
    }

    std::vector<DocPair> pairs;
    pairs.reserve(n_docs / 2);
    for (size_t m = 0; m + 1 < n_docs; m += 2) {
      pairs.push_back({perm[m], perm[m + 1]});
    }

    for (size_t p = 0; p < pairs.size() && pairs.size() > 1; ++p) {
      for (int attempt = 0; attempt < kMaxPartnerRetries &&
                            rules.Bad(pairs[p].first, pairs[p].second);
           ++attempt) {
        size_t q = rng.Uniform(pairs.size() - 1);
        if (q >= p) ++q;
        const size_t a = pairs[p].first;
        const size_t b = pairs[p].second;
        size_t c = pairs[q].first;
        size_t d = pairs[q].second;
        if (rng.Uniform(2) == 1) std::swap(c, d);
        if (!rules.Bad(a, c) && !rules.Bad(b, d)) {
          pairs[p] = {a, c};
          pairs[q] = {b, d};
        }
      }
    }

    PairingRound out;
    for (const DocPair& pair : pairs) {
      out.pairs.push_back(Ordered(pair.first, pair.second));
    }
    std::sort(out.pairs.begin(), out.pairs.end(), PairKeyLess{});

    if (n_docs % 2 == 1) {
      const size_t doc = perm[n_docs - 1];
      auto draw_partner = [&] {
        const size_t r = rng.Uniform(n_docs - 1);
        return r >= doc ? r + 1 : r;
      };
      size_t partner = draw_partner();
      for (int attempt = 0;
           attempt < kMaxPartnerRetries && rules.Bad(doc, partner); ++attempt) {
        partner = draw_partner();
      }
      out.leftover = LeftoverAssignment{doc, partner};
    }

    for (const DocPair& pair : out.pairs) {
      if (rules.Repeats(pair.first, pair.second)) ++plan.residual_repeats;
      if (rules.Collides(pair.first, pair.second)) {
        ++plan.residual_topic_collisions;
      }
    }
    if (out.leftover) {
      if (rules.Repeats(out.leftover->doc, out.leftover->partner)) {
        ++plan.residual_repeats;
      }
      if (rules.Collides(out.leftover->doc, out.leftover->partner)) {
        ++plan.residual_topic_collisions;
      }
    }
    if (plan.partner_dedup) {
      for (const DocPair& pair : out.pairs) seen.insert(pair);
      if (out.leftover) {
        seen.insert(Ordered(out.leftover->doc, out.leftover->partner));
      }
    }
    plan.rounds.push_back(std::move(out));
  }
  return plan;
}

std::string FormatInput(std::string_view topic_label,
                        std::string_view context) {
  if (topic_label.empty() || context.empty()) {
    throw Error(ErrorCode::kPrecondition,
                "prompt needs a non-empty topic and context");
  }
  std::string out = "Summarize: topic = ";
  out.append(topic_label);
  out.append(", context = ");
  out.append(context);
  return out;
}

std::vector<AugmentedExample> MaterializeExamples(
    const PairingPlan& plan, const std::vector<AnnotatedExample>& annotated,
    const MaterializeOptions& options) {
  {
    std::set<std::string_view> ids;
    for (const AnnotatedExample& ex : annotated) {
      if (!ids.insert(ex.doc_id).second) {
        throw Error(ErrorCode::kPrecondition,
                    "annotated examples repeat doc_id '" + ex.doc_id + "'");
      }
    }
  }
  auto at = [&](size_t index) -> const AnnotatedExample& {
    if (index >= annotated.size()) {
      throw Error(ErrorCode::kRange,
                  "plan index " + std::to_string(index) + " out of range for " +
                      std::to_string(annotated.size()) + " annotations");
    }
    return annotated[index];
  };

  std::vector<std::vector<AugmentedExample>> per_round(plan.rounds.size());
  ParallelFor(plan.rounds.size(), options.workers, [&](size_t r) {
    const PairingRound& round = plan.rounds[r];
    const int round_index = static_cast<int>(r);
    std::vector<AugmentedExample>& out = per_round[r];
    const std::string& sep = options.separator;
    for (size_t p = 0; p < round.pairs.size(); ++p) {
      const AnnotatedExample& a = at(round.pairs[p].first);
      const AnnotatedExample& b = at(round.pairs[p].second);
      out.push_back(MakeExample(a, a, b, sep, round_index, p, false));
      out.push_back(MakeExample(b, a, b, sep, round_index, p, false));
      if (plan.xx) {
        out.push_back(MakeExample(a, b, a, sep, round_index, p, true));
        out.push_back(MakeExample(b, b, a, sep, round_index, p, true));
      }
    }
    if (round.leftover) {
      const size_t position = round.pairs.size();
      const AnnotatedExample& doc = at(round.leftover->doc);
      const AnnotatedExample& partner = at(round.leftover->partner);
      out.push_back(
          MakeExample(doc, doc, partner, sep, round_index, position, false));
      if (plan.xx) {
        out.push_back(
            MakeExample(doc, partner, doc, sep, round_index, position, true));
      }
    }
  });

  std::vector<AugmentedExample> examples;
  for (auto& round : per_round) {
    std::move(round.begin(), round.end(), std::back_inserter(examples));
  }
  std::stable_sort(
      examples.begin(), examples.end(),
      [](const AugmentedExample& x, const AugmentedExample& y) {
        return std::tie(x.round_index, x.pair_position, x.mirrored) <
               std::tie(y.round_index, y.pair_position, y.mirrored);
      });
  return examples;
}

std::vector<AugmentedExample> MaterializeBaseline(
    const std::vector<AnnotatedExample>& annotated) {
  if (annotated.empty()) {
    throw Error(ErrorCode::kPrecondition, "no annotated examples");
  }
  std::vector<AugmentedExample> out;
  out.reserve(annotated.size());
  for (size_t i = 0; i < annotated.size(); ++i) {
    const AnnotatedExample& ex = annotated[i];
    out.push_back(AugmentedExample{
        .input_text = FormatInput(ex.topic.label, ex.abstract_text),
        .target_text = ex.summary_text,
        .topic_label = ex.topic.label,
        .source_doc_ids = {ex.doc_id, ex.doc_id},
        .round_index = 0,
        .mirrored = false,
        .pair_position = i});
  }
  return out;
}

size_t Utf8Length(std::string_view text) {
  return static_cast<size_t>(std::count_if(
      text.begin(), text.end(),
      [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string SerializeDataset(const std::vector<AugmentedExample>& examples) {
  std::string out;
  for (const AugmentedExample& ex : examples) {
    ordered_json record;
    record["input"] = ex.input_text;
    record["target"] = ex.target_text;
    record["topic"] = ex.topic_label;
    record["source_ids"] = {ex.source_doc_ids.first, ex.source_doc_ids.second};
    record["round"] = ex.round_index;
    record["mirrored"] = ex.mirrored;
    out += DumpJsonLine(record);
    out.push_back('\n');
  }
  return out;
}

std::filesystem::path ManifestPath(const std::filesystem::path& dataset_path) {
  std::filesystem::path out = dataset_path;
  out += ".manifest.json";
  return out;
}

std::string SerializeManifest(const DatasetManifest& m) {
  ordered_json config;
  config["seed"] = m.config.seed;
  config["multiplier"] = m.config.multiplier;
  config["xx"] = m.config.xx;
  config["baseline"] = m.config.baseline;
  config["separator"] = m.config.separator;
  config["annotator_method"] = m.config.annotator_method;

  ordered_json record;
  record["config"] = std::move(config);
  record["example_count"] = m.example_count;
  record["per_round_counts"] = m.per_round_counts;
  record["checksum_sha256"] = m.checksum;
  record["max_input_chars"] = m.max_input_chars;
  record["max_target_chars"] = m.max_target_chars;
  record["mean_input_chars"] = m.mean_input_chars;
  record["partner_dedup"] = m.partner_dedup;
  record["residual_repeats"] = m.residual_repeats;
  record["residual_topic_collisions"] = m.residual_topic_collisions;
  return record.dump(2) + "\n";
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  try {
    const nlohmann::json record = nlohmann::json::parse(text);
    const nlohmann::json& config = record.at("config");
    DatasetManifest m;
    m.config.seed = config.at("seed").get<uint64_t>();
    m.config.multiplier = config.at("multiplier").get<int>();
    m.config.xx = config.at("xx").get<bool>();
    m.config.baseline = config.at("baseline").get<bool>();
    m.config.separator = config.at("separator").get<std::string>();
    m.config.annotator_method =
        config.at("annotator_method").get<std::string>();
    m.example_count = record.at("example_count").get<size_t>();
    m.per_round_counts =
        record.at("per_round_counts").get<std::vector<size_t>>();
    m.checksum = record.at("checksum_sha256").get<std::string>();
    m.max_input_chars = record.at("max_input_chars").get<size_t>();
    m.max_target_chars = record.at("max_target_chars").get<size_t>();
    m.mean_input_chars = record.at("mean_input_chars").get<double>();
    m.partner_dedup = record.at("partner_dedup").get<bool>();
    m.residual_repeats = record.at("residual_repeats").get<size_t>();
    m.residual_topic_collisions =
        record.at("residual_topic_collisions").get<size_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInput,
                "bad manifest " + path.string() + ": " + e.what());
  }
}

DatasetManifest WriteDataset(const std::vector<AugmentedExample>& examples,
                             const std::filesystem::path& path,
                             const DatasetConfig& config,
                             const PairingPlan* plan) {
  if (examples.empty()) {
    throw Error(ErrorCode::kPrecondition, "refusing to write empty dataset");
  }
  const std::string bytes = SerializeDataset(examples);

  DatasetManifest m;
  m.config = config;
  m.example_count = examples.size();
  size_t total_input_chars = 0;
  for (const AugmentedExample& ex : examples) {
    const auto round = static_cast<size_t>(ex.round_index);
    if (m.per_round_counts.size() <= round) {
      m.per_round_counts.resize(round + 1, 0);
    }
    ++m.per_round_counts[round];
    const size_t input_chars = Utf8Length(ex.input_text);
    total_input_chars += input_chars;
    m.max_input_chars = std::max(m.max_input_chars, input_chars);
    m.max_target_chars =
        std::max(m.max_target_chars, Utf8Length(ex.target_text));
  }
  m.mean_input_chars = static_cast<double>(total_input_chars) /
                       static_cast<double>(examples.size());
  m.checksum = Sha256Hex(bytes);
  if (plan != nullptr) {
    m.partner_dedup = plan->partner_dedup;
    m.residual_repeats = plan->residual_repeats;
    m.residual_topic_collisions = plan->residual_topic_collisions;
  }

  WriteFileAtomic(path, bytes);
  WriteFileAtomic(ManifestPath(path), SerializeManifest(m));
  return m;
}

std::vector<AugmentedExample> LoadDataset(const std::filesystem::path& path) {
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  std::vector<AugmentedExample> out;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    const nlohmann::json record = ParseJsonLine(name, line_number, line);
    try {
      AugmentedExample ex;
      ex.input_text = record.at("input").get<std::string>();
      ex.target_text = record.at("target").get<std::string>();
      ex.topic_label = record.at("topic").get<std::string>();
      const auto ids = record.at("source_ids").get<std::vector<std::string>>();
      if (ids.size() != 2) {
        throw LineError(name, line_number, "source_ids must have 2 entries");
      }
      ex.source_doc_ids = {ids[0], ids[1]};
      ex.round_index = record.at("round").get<int>();
      ex.mirrored = record.at("mirrored").get<bool>();
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw LineError(name, line_number, e.what());
    }
  });
  return out;
}

}  // namespace tcsaug
