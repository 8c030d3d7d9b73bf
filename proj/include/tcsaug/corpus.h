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

#ifndef TCSAUG_CORPUS_H_
#define TCSAUG_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tcsaug {

enum class Split { kTrain, kValidation, kTest };

std::string_view SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

struct SourceDocument {
  std::string doc_id;
  std::string abstract_text;
  Split split = Split::kTrain;
};

struct ReferenceSummary {
  std::string doc_id;
  int summary_index = 0;
  std::string summary_text;
};

// One input line: a document and all of its reference summaries.
struct CorpusEntry {
  SourceDocument document;
  std::vector<ReferenceSummary> summaries;
};

struct Corpus {
  std::vector<CorpusEntry> train;
  std::vector<CorpusEntry> validation;
  std::vector<CorpusEntry> test;

  std::vector<CorpusEntry>& entries(Split split);
  const std::vector<CorpusEntry>& entries(Split split) const;
};

struct CorpusStats {
  size_t n_train = 0;
  size_t n_validation = 0;
  size_t n_test = 0;
  // Number of summaries -> number of test documents with that many.
  std::map<size_t, size_t> summaries_per_test_doc;

  bool operator==(const CorpusStats&) const = default;
};

// Names of the fields read from each input record. The defaults are the
// public SciTLDR names; Canonical() reads files written by WriteCorpus.
struct FieldMapping {
  std::string id = "paper_id";
  std::string source = "source";
  std::string target = "target";

  static FieldMapping Canonical();
};

// Reads one split from a line-delimited JSON file. The source field may be
// a string or a list of sentences (joined with single spaces); the target
// field may be a string or a list of strings. Leading and trailing
// whitespace is trimmed; interior whitespace is kept verbatim.
//
// Throws LineError for malformed or invalid records (including invalid
// UTF-8), and Error(kInput) for a missing or empty file.
std::vector<CorpusEntry> LoadCorpus(const std::filesystem::path& path,
                                    Split split,
                                    const FieldMapping& fields = {});

// Counts documents per split. Throws Error(kStructure) naming the doc_id if
// a train document does not have exactly one summary, or if a doc_id
// repeats within a split.
CorpusStats ValidateCorpus(const Corpus& corpus);

// Writes entries in the canonical format (`doc_id`, `abstract`,
// `summaries`), one per line, in order.
std::string SerializeCorpus(const std::vector<CorpusEntry>& entries);
void WriteCorpus(const std::filesystem::path& path,
                 const std::vector<CorpusEntry>& entries);

std::string SerializeStats(const CorpusStats& stats);

}  // namespace tcsaug

#endif  // TCSAUG_CORPUS_H_
