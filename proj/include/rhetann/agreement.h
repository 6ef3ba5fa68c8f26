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

#ifndef RHETANN_AGREEMENT_H_
#define RHETANN_AGREEMENT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/prompt.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

// Per-sentence annotator values. Positions line up with the annotator list of
// the matrix the unit came from; nullopt is "absent".
struct AgreementUnit {
  std::string sentence_id;
  std::vector<std::optional<PropertySet>> values;

  std::size_t present() const;
};

// Drops rows in which every annotator is absent.
std::vector<AgreementUnit> UnitsFromMatrix(const AnnotationMatrix& matrix);

// Nominal label used for alpha: sorted ids joined with '|'. The empty set is
// the label "".
std::string CanonicalLabel(const PropertySet& set);

double JaccardIndex(const PropertySet& a, const PropertySet& b);

// Nominal alpha over the coincidence matrix. nullopt when no unit has two
// values or when expected disagreement is zero (a single label overall).
// Throws InvalidArgument on an empty unit list.
std::optional<double> KrippendorffAlpha(const std::vector<AgreementUnit>& units);

enum class JaccardMode {
  kPerUnitMean,  // mean of pairwise scores per unit, then mean over units
  kPooledPairs,  // every pair across every unit weighted equally
};

struct MetricResult {
  std::optional<double> value;  // nullopt when no unit is eligible
  std::size_t n_units = 0;      // units that entered the computation
  std::size_t n_excluded = 0;   // units with fewer than two values
};

MetricResult JaccardAgreement(const std::vector<AgreementUnit>& units,
                              JaccardMode mode = JaccardMode::kPerUnitMean);
MetricResult ExactAgreement(const std::vector<AgreementUnit>& units);

struct AgreementReport {
  std::string feature_id;
  std::string feature_name;
  std::optional<double> krippendorff;
  std::optional<double> jaccard;
  std::optional<double> exact;
  std::size_t n_units = 0;       // units with at least one value
  std::size_t n_pairable = 0;    // units with at least two values
};

AgreementReport ComputeAgreement(const Feature& feature,
                                 const std::vector<AgreementUnit>& units,
                                 JaccardMode mode = JaccardMode::kPerUnitMean);

struct ConsistencyReport {
  std::string feature_id;
  std::string model;
  double temperature = 0.0;
  PromptVersion version = PromptVersion::kV1;
  std::optional<double> exact_consistency;
  std::size_t n_prompts = 0;
  std::size_t n_skipped = 0;               // exchanges with a single response
  std::vector<std::string> flagged;       // exchange ids with unparseable replies

  // "gpt-4@0.2", or "gpt-4/v2@0.2" for single-property prompts.
  std::string column() const;
};

// True iff every response parsed and all parsed sets are identical.
bool ExchangeConsistent(const AssistantExchange& exchange);

// Consistency over the exchanges of one feature, model, temperature and
// prompt version. Exchanges with fewer than two responses carry no
// repetition signal and are skipped.
ConsistencyReport IntraLlmConsistency(const std::vector<AssistantExchange>& exchanges,
                                      std::string_view feature_id, std::string_view model,
                                      double temperature,
                                      PromptVersion version = PromptVersion::kV1);

// One report per (feature, model, temperature, version) found in `exchanges`,
// ordered by feature id then column label.
std::vector<ConsistencyReport> ConsistencyReports(
    const std::vector<AssistantExchange>& exchanges);

// Agreement for every feature with at least one unit among `annotators`.
std::vector<AgreementReport> ComputeAgreementReports(
    const StoreView& view, const Taxonomy& taxonomy,
    const std::vector<std::string>& annotators,
    JaccardMode mode = JaccardMode::kPerUnitMean);

// Pipe table: Feature | K | J | E | <one column per model@temperature>.
// Rows sorted by feature name, cells at three decimals, "--" when undefined.
std::string RenderReportTable(const std::vector<AgreementReport>& reports,
                              const std::vector<ConsistencyReport>& consistency);
// One JSON object per feature, same order and content as the table.
std::string RenderReportRecords(const std::vector<AgreementReport>& reports,
                                const std::vector<ConsistencyReport>& consistency);

std::string FormatScore(const std::optional<double>& value);  // "0.667" / "--"

}  // namespace rhetann

#endif  // RHETANN_AGREEMENT_H_
