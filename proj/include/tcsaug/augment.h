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

#ifndef TCSAUG_AUGMENT_H_
#define TCSAUG_AUGMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsaug/annotate.h"

namespace tcsaug {

// Retry budget for both topic-collision and repeated-partner resampling.
inline constexpr int kMaxPartnerRetries = 16;

struct DocPair {
  size_t first = 0;  // always < second
  size_t second = 0;

  bool operator==(const DocPair&) const = default;
};

// The unmatched document of an odd-sized round, paired one-way with a
// partner that is already matched elsewhere in the round.
struct LeftoverAssignment {
  size_t doc = 0;
  size_t partner = 0;

  bool operator==(const LeftoverAssignment&) const = default;
};

struct PairingRound {
  std::vector<DocPair> pairs;  // sorted by first index
  std::optional<LeftoverAssignment> leftover;
};

struct PairingPlan {
  uint64_t seed = 0;
  int multiplier = 1;
  bool xx = false;
  size_t n_docs = 0;
  std::vector<PairingRound> rounds;

  // Whether cross-round partner de-duplication was active (n_docs > 2k).
  bool partner_dedup = false;
  // Pairings that still repeat an earlier round's partner, or still share a
  // topic label, after the retry budget ran out.
  size_t residual_repeats = 0;
  size_t residual_topic_collisions = 0;
};

// Each round is a random perfect matching of [0, n_docs) drawn from
// CounterStream(seed, round). Pairs that share a topic label (when `topics`
// is given) or, with n_docs > 2k, repeat an earlier partner are repaired by
// swapping partners with another random pair, up to kMaxPartnerRetries
// attempts; after that the pairing is accepted as is.
//
// Throws Error(kPrecondition) if n_docs < 2, k < 1, or topics is non-empty
// and its size differs from n_docs.
PairingPlan BuildPairingPlan(size_t n_docs, int k, bool xx, uint64_t seed,
                             std::span<const std::string> topics = {});

struct AugmentedExample {
  std::string input_text;
  std::string target_text;
  std::string topic_label;
  // Doc ids of the first and second context abstract; equal for baseline.
  std::pair<std::string, std::string> source_doc_ids;
  int round_index = 0;
  bool mirrored = false;
  // Position of the originating pair within its round; leftovers come last.
  size_t pair_position = 0;

  bool operator==(const AugmentedExample&) const = default;
};

// "Summarize: topic = {topic}, context = {context}". Throws
// Error(kPrecondition) if either argument is empty.
std::string FormatInput(std::string_view topic_label, std::string_view context);

struct MaterializeOptions {
  std::string separator = " ";
  size_t workers = 1;
};

// For pair (i, j): (A_i+A_j, t_i, s_i) and (A_i+A_j, t_j, s_j). For a
// leftover (i, p): (A_i+A_p, t_i, s_i). With plan.xx each example also gets
// a mirrored copy with the contexts swapped. Output is ordered by round,
// pair position, then unmirrored before mirrored.
std::vector<AugmentedExample> MaterializeExamples(
    const PairingPlan& plan, const std::vector<AnnotatedExample>& annotated,
    const MaterializeOptions& options = {});

// One single-context example per annotation.
std::vector<AugmentedExample> MaterializeBaseline(
    const std::vector<AnnotatedExample>& annotated);

struct DatasetConfig {
  uint64_t seed = 0;
  int multiplier = 1;
  bool xx = false;
  bool baseline = false;
  std::string separator = " ";
  std::string annotator_method = "fallback";

  bool operator==(const DatasetConfig&) const = default;
};

struct DatasetManifest {
  DatasetConfig config;
  size_t example_count = 0;
  std::vector<size_t> per_round_counts;
  std::string checksum;  // SHA-256 of the dataset file bytes
  size_t max_input_chars = 0;
  size_t max_target_chars = 0;
  double mean_input_chars = 0.0;
  bool partner_dedup = false;
  size_t residual_repeats = 0;
  size_t residual_topic_collisions = 0;
};

// Dataset records carry `input`, `target`, `topic`, `source_ids`, `round`,
// `mirrored`, in that order.
std::string SerializeDataset(const std::vector<AugmentedExample>& examples);

// Writes the dataset to `path` and the manifest to ManifestPath(path).
// Throws Error(kPrecondition) on an empty example list.
DatasetManifest WriteDataset(const std::vector<AugmentedExample>& examples,
                             const std::filesystem::path& path,
                             const DatasetConfig& config,
                             const PairingPlan* plan = nullptr);

std::filesystem::path ManifestPath(const std::filesystem::path& dataset_path);
std::string SerializeManifest(const DatasetManifest& manifest);
DatasetManifest LoadManifest(const std::filesystem::path& path);

std::vector<AugmentedExample> LoadDataset(const std::filesystem::path& path);

// Counts UTF-8 code points.
size_t Utf8Length(std::string_view text);

}  // namespace tcsaug

#endif  // TCSAUG_AUGMENT_H_
