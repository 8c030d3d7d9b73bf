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

// Test-only helpers: scratch directories and a synthetic corpus generator
// that records its own construction parameters.

#ifndef TCSAUG_TESTS_FIXTURES_H_
#define TCSAUG_TESTS_FIXTURES_H_

#include <stdlib.h>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcsaug/annotate.h"
#include "tcsaug/corpus.h"

namespace tcsaug::testing {

class ScratchDir {
 public:
  ScratchDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "tcsaug_XXXXXX").string();
    path_ = ::mkdtemp(pattern.data());
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::filesystem::path& path,
                      const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// Synthetic SciTLDR-shaped corpus. Train document i is dominated by the
// token "term<i>" so the fallback annotator's topic is known by
// construction. Test document i has `test_summaries` summaries; summary m
// is dominated by "aspect<i>m<m>", except that every `duplicate_every`-th
// test document repeats one aspect across all its summaries.
struct FixtureOptions {
  size_t n_train = 10;
  size_t n_validation = 3;
  size_t n_test = 4;
  size_t test_summaries = 3;
  size_t duplicate_every = 0;  // 0 = never
};

struct FixtureCorpus {
  FixtureOptions options;
  CorpusStats expected_stats;
  std::filesystem::path train, validation, test;
};

inline std::string TrainTerm(size_t i) { return "term" + std::to_string(i); }

inline std::string TrainAbstract(size_t i) {
  const std::string t = TrainTerm(i);
  return "We study " + t + " networks. The " + t + " model improves " + t +
         " accuracy on benchmark data.";
}

inline std::string TrainSummary(size_t i) {
  return "A " + TrainTerm(i) + " study.";
}

inline std::string Aspect(size_t doc, size_t m) {
  return "aspect" + std::to_string(doc) + "m" + std::to_string(m);
}

inline FixtureCorpus MakeFixtureCorpus(const std::filesystem::path& dir,
                                       const FixtureOptions& spec = {}) {
  using nlohmann::json;
  FixtureCorpus out;
  out.options = spec;
  out.train = dir / "train.jsonl";
  out.validation = dir / "dev.jsonl";
  out.test = dir / "test.jsonl";

  std::string train;
  for (size_t i = 0; i < spec.n_train; ++i) {
    json r = {{"paper_id", "train-" + std::to_string(i)},
              {"source", json::array({"We study " + TrainTerm(i) + " networks.",
                                      "The " + TrainTerm(i) +
                                          " model improves " + TrainTerm(i) +
                                          " accuracy on benchmark data."})},
              {"target", json::array({TrainSummary(i)})}};
    train += r.dump() + "\n";
  }
  std::string validation;
  for (size_t i = 0; i < spec.n_validation; ++i) {
    json r = {{"paper_id", "dev-" + std::to_string(i)},
              {"source", "Validation abstract " + std::to_string(i) + "."},
              {"target", json::array({"dev summary one", "dev summary two"})}};
    validation += r.dump() + "\n";
  }
  std::string test;
  for (size_t i = 0; i < spec.n_test; ++i) {
    const bool duplicate =
        spec.duplicate_every != 0 && i % spec.duplicate_every == 0;
    json targets = json::array();
    for (size_t m = 0; m < spec.test_summaries; ++m) {
      const std::string a = Aspect(i, duplicate ? 0 : m);
      targets.push_back("Results on " + a + " and " + a + " tasks.");
    }
    json r = {{"paper_id", "test-" + std::to_string(i)},
              {"source", "Test abstract " + std::to_string(i) + " text."},
              {"target", targets}};
    test += r.dump() + "\n";
  }
  WriteText(out.train, train);
  WriteText(out.validation, validation);
  WriteText(out.test, test);

  out.expected_stats.n_train = spec.n_train;
  out.expected_stats.n_validation = spec.n_validation;
  out.expected_stats.n_test = spec.n_test;
  if (spec.n_test > 0) {
    out.expected_stats.summaries_per_test_doc[spec.test_summaries] =
        spec.n_test;
  }
  return out;
}

// Annotated examples built directly (no annotator), with distinct topics.
inline std::vector<AnnotatedExample> MakeAnnotated(size_t n) {
  std::vector<AnnotatedExample> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back(AnnotatedExample{
        .doc_id = "doc-" + std::to_string(i),
        .summary_index = 0,
        .abstract_text = "Abstract number " + std::to_string(i) + " about " +
                         TrainTerm(i) + ".",
        .topic = TopicCandidate{.label = TrainTerm(i),
                                .confidence = 0.5,
                                .method = AnnotationMethod::kFallback},
        .summary_text = TrainSummary(i)});
  }
  return out;
}

}  // namespace tcsaug::testing

#endif  // TCSAUG_TESTS_FIXTURES_H_
