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

#ifndef RHETANN_EVALKIT_H_
#define RHETANN_EVALKIT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

// True iff every listed annotator has a value and all values are equal.
bool IsConsensus(const AnnotationRow& row);

struct ConsensusOptions {
  std::size_t k = 30;
  std::uint64_t seed = 0;
  // Skip sentences on which everyone agreed that nothing applies.
  bool exclude_empty = false;
};

struct ConsensusSelection {
  std::string feature_id;
  std::vector<std::string> sentence_ids;  // sorted
  std::size_t available = 0;
  std::optional<std::string> shortfall;  // set when fewer than k were available
};

// Samples up to k consensus sentences uniformly with the seed. Zero available
// sentences is reported through `shortfall`, not thrown.
ConsensusSelection SelectConsensus(const StoreView& view, std::string_view feature_id,
                                   const std::vector<std::string>& annotators,
                                   const ConsensusOptions& options = {});

enum class ScoreMode { kExactSet, kPerProperty };

const char* ScoreModeName(ScoreMode m);

struct AccuracyCell {
  std::size_t correct = 0;
  std::size_t n = 0;

  std::optional<double> accuracy() const;
};

// Scores predictions against gold. exact_set: one decision per sentence;
// per_property: one per (sentence, property). Throws ValidationError listing
// ids present on one side only.
AccuracyCell Score(const Feature& feature, const std::map<std::string, PropertySet>& predictions,
                   const std::vector<GroundTruthLabel>& gold, ScoreMode mode);

enum class AggregateMode { kMacro, kMicro };

const char* AggregateModeName(AggregateMode m);

// Macro: unweighted mean of cell accuracies. Micro: pooled correct / pooled n.
// nullopt if no cell has n > 0.
std::optional<double> Aggregate(const std::vector<AccuracyCell>& cells, AggregateMode mode);

// One column of an accuracy table.
struct SystemColumn {
  std::string name;
  // Annotator whose latest records are the predictions; empty selects the
  // human consensus label.
  std::string annotator_id;
  ScoreMode mode = ScoreMode::kExactSet;
};

struct AccuracyReport {
  std::vector<std::string> columns;
  struct Row {
    std::string feature_id;
    std::string feature_name;
    std::map<std::string, AccuracyCell> cells;  // by column name
  };
  std::vector<Row> rows;  // sorted by feature name

  std::optional<double> Aggregate(const std::string& column, AggregateMode mode) const;
};

// Scores each system on every listed feature that has ground truth. The
// human column uses the consensus among `human_annotators`.
AccuracyReport ScoreStore(const StoreView& view, const Taxonomy& taxonomy,
                          const std::vector<std::string>& feature_ids,
                          const std::vector<std::string>& human_annotators,
                          const std::vector<SystemColumn>& systems);

// Default columns: "Human" plus one per LLM annotator in the store; V2
// annotators are scored per property.
std::vector<SystemColumn> DefaultSystems(const StoreView& view);

// Same table shape as agreement reports, with "All features (micro)" and
// "All features (macro)" rows.
std::string RenderAccuracyTable(const AccuracyReport& report);
std::string RenderAccuracyRecords(const AccuracyReport& report);

struct ErrorScope {
  std::optional<std::string> feature_id;
  std::optional<std::string> model;
};

// Counts per category over the tag ledger; every category is present.
std::map<ErrorCategory, std::size_t> SummarizeErrors(const StoreView& view,
                                                     const ErrorScope& scope = {});
std::string RenderErrorSummary(const std::map<ErrorCategory, std::size_t>& summary);

}  // namespace rhetann

#endif  // RHETANN_EVALKIT_H_
