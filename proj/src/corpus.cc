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

#include "tcsaug/corpus.h"

#include <set>
#include <utility>

#include "json.hpp"
#include "tcsaug/error.h"
#include "tcsaug/io.h"

namespace tcsaug {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Accepts a string or a list of strings.
std::string JoinedText(const json& value, const std::string& path, size_t line,
                       const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string out;
    for (const json& part : value) {
      if (!part.is_string()) {
        throw LineError(path, line,
                        "field '" + field + "' must contain only strings");
      }
      const std::string_view piece = Trim(part.get_ref<const std::string&>());
      if (piece.empty()) continue;
      if (!out.empty()) out.push_back(' ');
      out.append(piece);
    }
    return out;
  }
  throw LineError(path, line,
                  "field '" + field + "' must be a string or list of strings");
}

std::string IdText(const json& value, const std::string& path, size_t line,
                   const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return value.dump();
  throw LineError(path, line, "field '" + field + "' must be a string id");
}

}  // namespace

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "dev") return Split::kValidation;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

std::vector<CorpusEntry>& Corpus::entries(Split split) {
  switch (split) {
    case Split::kTrain:
      return train;
    case Split::kValidation:
      return validation;
    case Split::kTest:
      return test;
  }
  return train;
}

const std::vector<CorpusEntry>& Corpus::entries(Split split) const {
  return const_cast<Corpus*>(this)->entries(split);
}

FieldMapping FieldMapping::Canonical() {
  return FieldMapping{
      .id = "doc_id", .source = "abstract", .target = "summaries"};
}

std::vector<CorpusEntry> LoadCorpus(const std::filesystem::path& path,
                                    Split split, const FieldMapping& fields) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kInput, "corpus file not found: " + path.string());
  }
  const std::string text = ReadFile(path);
  const std::string name = path.string();
  std::vector<CorpusEntry> entries;
  std::set<std::string, std::less<>> seen;
  ForEachLine(text, [&](size_t line_number, std::string_view line) {
    if (Trim(line).empty()) {
      throw LineError(name, line_number, "blank line");
    }
    const json record = ParseJsonLine(name, line_number, line);
    for (const std::string* field :
         {&fields.id, &fields.source, &fields.target}) {
      if (!record.contains(*field)) {
        throw LineError(name, line_number, "missing field '" + *field + "'");
      }
    }
    CorpusEntry entry;
    entry.document.doc_id =
        IdText(record[fields.id], name, line_number, fields.id);
    if (entry.document.doc_id.empty()) {
      throw LineError(name, line_number, "empty id");
    }
    if (!seen.insert(entry.document.doc_id).second) {
      throw LineError(name, line_number,
                      "duplicate doc_id '" + entry.document.doc_id + "'");
    }
    entry.document.abstract_text = std::string(Trim(
        JoinedText(record[fields.source], name, line_number, fields.source)));
    if (entry.document.abstract_text.empty()) {
      throw LineError(name, line_number,
                      "empty source text for '" + entry.document.doc_id + "'");
    }
    entry.document.split = split;

    const json& target = record[fields.target];
    std::vector<std::string> summaries;
    if (target.is_string()) {
      summaries.push_back(target.get<std::string>());
    } else if (target.is_array()) {
      for (const json& s : target) {
        if (!s.is_string()) {
          throw LineError(name, line_number, "summaries must be strings");
        }
        summaries.push_back(s.get<std::string>());
      }
    } else {
      throw LineError(
          name, line_number,
          "field '" + fields.target + "' must be a string or list of strings");
    }
    if (summaries.empty()) {
      throw LineError(name, line_number,
                      "no summaries for '" + entry.document.doc_id + "'");
    }
    for (size_t i = 0; i < summaries.size(); ++i) {
      std::string summary(Trim(summaries[i]));
      if (summary.empty()) {
        throw LineError(name, line_number,
                        "empty summary " + std::to_string(i) + " for '" +
                            entry.document.doc_id + "'");
      }
      entry.summaries.push_back(
          ReferenceSummary{.doc_id = entry.document.doc_id,
                           .summary_index = static_cast<int>(i),
                           .summary_text = std::move(summary)});
    }
    entries.push_back(std::move(entry));
  });
  if (entries.empty()) {
    throw Error(ErrorCode::kInput, "empty corpus file: " + name);
  }
  return entries;
}

CorpusStats ValidateCorpus(const Corpus& corpus) {
  for (const Split split : {Split::kTrain, Split::kValidation, Split::kTest}) {
    std::set<std::string, std::less<>> ids;
    for (const CorpusEntry& entry : corpus.entries(split)) {
      if (!ids.insert(entry.document.doc_id).second) {
        throw Error(ErrorCode::kStructure,
                    "duplicate doc_id '" + entry.document.doc_id + "' in " +
                        std::string(SplitName(split)) + " split");
      }
    }
  }
  for (const CorpusEntry& entry : corpus.train) {
    if (entry.summaries.size() != 1) {
      throw Error(ErrorCode::kStructure,
                  "train document '" + entry.document.doc_id + "' has " +
                      std::to_string(entry.summaries.size()) +
                      " summaries; expected exactly 1");
    }
  }
  CorpusStats stats;
  stats.n_train = corpus.train.size();
  stats.n_validation = corpus.validation.size();
  stats.n_test = corpus.test.size();
  for (const CorpusEntry& entry : corpus.test) {
    ++stats.summaries_per_test_doc[entry.summaries.size()];
  }
  return stats;
}

std::string SerializeCorpus(const std::vector<CorpusEntry>& entries) {
  std::string out;
  for (const CorpusEntry& entry : entries) {
    ordered_json record;
    record["doc_id"] = entry.document.doc_id;
    record["abstract"] = entry.document.abstract_text;
    ordered_json summaries = ordered_json::array();
    for (const ReferenceSummary& s : entry.summaries) {
      summaries.push_back(s.summary_text);
    }
    record["summaries"] = std::move(summaries);
    out += DumpJsonLine(record);
    out.push_back('\n');
  }
  return out;
}

void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<CorpusEntry>& entries) {
  WriteFileAtomic(path, SerializeCorpus(entries));
}

std::string SerializeStats(const CorpusStats& stats) {
  ordered_json record;
  record["n_train"] = stats.n_train;
  record["n_validation"] = stats.n_validation;
  record["n_test"] = stats.n_test;
  ordered_json histogram = ordered_json::object();
  for (const auto& [count, docs] : stats.summaries_per_test_doc) {
    histogram[std::to_string(count)] = docs;
  }
  record["summaries_per_test_doc"] = std::move(histogram);
  return record.dump(2) + "\n";
}

}  // namespace tcsaug
