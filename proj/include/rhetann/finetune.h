// Copyright 2026 The RhetAnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RHETANN_FINETUNE_H_
#define RHETANN_FINETUNE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/corpus.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

enum class DatasetKind { kSmall, kMedium, kLarge };
enum class Polarity { kPositive, kNegative };
enum class Provenance { kGroundTruth, kMajorityVote, kAbsence };

const char* DatasetKindName(DatasetKind k);
std::optional<DatasetKind> ParseDatasetKind(std::string_view name);
const char* PolarityName(Polarity p);
const char* ProvenanceName(Provenance p);

struct TrainingExample {
  std::string sentence_id;
  std::string feature_id;
  std::string property_id;
  Polarity polarity = Polarity::kPositive;
  Provenance provenance = Provenance::kMajorityVote;
  std::string system_text;
  std::string user_text;       // the V2 prompt for (feature, property, sentence)
  std::string assistant_text;  // {"Answer": ...[, "Explanation": ...]}

  bool operator==(const TrainingExample&) const = default;
};

// Why (sentence, property) pairs did not become examples.
struct DropStats {
  std::size_t minority = 0;           // applied by some but not a strict majority
  std::size_t single_annotator = 0;   // applied, but only one annotator present
  std::size_t excluded = 0;           // ground-truth / explicit exclusions
  std::size_t downsampled = 0;        // negatives removed by downsampling

  std::size_t total() const { return minority + single_annotator + excluded + downsampled; }
};

struct Dataset {
  DatasetKind kind = DatasetKind::kLarge;
  std::string feature_id;
  std::vector<TrainingExample> examples;  // grouped by property, corpus order
  std::vector<std::string> warnings;
  DropStats drops;
  std::size_t candidate_pairs = 0;  // sentences considered x properties
  std::string source_snapshot;      // digest of the store export
};

struct BuildOptions {
  std::uint64_t seed = 0;
  // Human annotators to vote with; empty means every human in the store.
  std::vector<std::string> annotators;
  // Sentence ids that must never be emitted, on top of the feature's ground
  // truth sentences.
  std::set<std::string> exclusions;
  std::size_t medium_cap = 25;  // per polarity
  bool downsample_negatives = false;  // large only
};

// Label of one (sentence, property) under the vote rule.
enum class VoteLabel { kPositive, kNegative, kMinority, kSingleAnnotator, kUnlabeled };

// k = non-absent annotators, a = those that applied the property.
// Positive iff k >= 2 and a >= floor(k/2) + 1; negative iff a == 0 and k >= 1.
VoteLabel ClassifyVote(std::size_t k, std::size_t a);

// One positive and one negative per property from ground truth, with
// explanations. Throws DataError naming the first property lacking either.
Dataset BuildSmall(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                   std::string_view feature_id, const BuildOptions& options = {});
// Up to medium_cap per polarity per property, seeded; answer only. Shortfalls
// are recorded as warnings. Throws DataError if a property has no candidate
// of either polarity.
Dataset BuildMedium(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                    std::string_view feature_id, const BuildOptions& options = {});
// Every majority positive and absence negative; answer only.
Dataset BuildLarge(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                   std::string_view feature_id, const BuildOptions& options = {});

Dataset BuildDataset(DatasetKind kind, const StoreView& view, const Taxonomy& taxonomy,
                     const Corpus& corpus, std::string_view feature_id,
                     const BuildOptions& options = {});

struct PropertyCount {
  std::size_t positive = 0;
  std::size_t negative = 0;
};

struct DatasetManifest {
  DatasetKind kind = DatasetKind::kLarge;
  std::string feature_id;
  std::map<std::string, PropertyCount> counts;  // by property id
  std::size_t line_count = 0;
  std::string source_snapshot;
  std::string digest;  // of the emitted training file
  std::uint64_t seed = 0;
  DropStats drops;
  std::size_t candidate_pairs = 0;
  std::vector<std::string> warnings;
  // Per-line metadata, aligned with the training file.
  std::vector<TrainingExample> lines;
};

struct EmitResult {
  std::string jsonl;
  DatasetManifest manifest;
};

// Chat-format JSONL, one {"messages": [system, user, assistant]} per line.
// Examples are shuffled per (property, polarity) bucket with `seed` and then
// interleaved round-robin. Throws InvalidArgument for an empty dataset.
EmitResult Emit(const Dataset& dataset, std::uint64_t seed);

std::string ManifestToJson(const DatasetManifest& manifest);
DatasetManifest ManifestFromJson(std::string_view text);

// Rebuilds examples from a training file and its manifest. Throws DataError
// if a line is malformed or disagrees with the manifest.
std::vector<TrainingExample> ParseTrainingFile(std::string_view jsonl,
                                               const DatasetManifest& manifest);

// Writes <dir>/<feature>-<kind>.jsonl and .manifest.json; returns the paths.
std::pair<std::string, std::string> WriteDataset(const std::string& dir,
                                                 const EmitResult& result);

}  // namespace rhetann

#endif  // RHETANN_FINETUNE_H_
