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

#ifndef RHETANN_CAMPAIGN_H_
#define RHETANN_CAMPAIGN_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/corpus.h"
#include "rhetann/gateway.h"
#include "rhetann/prompt.h"
#include "rhetann/records.h"

namespace rhetann {

struct CampaignSpec {
  std::vector<std::string> feature_ids;   // empty: every manual feature
  std::vector<std::string> sentence_ids;  // empty: the whole corpus
  PromptVersion version = PromptVersion::kV1;
  CallPolicy policy;
  // Stop after issuing this many prompts; 0 means no limit.
  std::size_t max_prompts = 0;
  Clock clock = SystemNow;
};

struct CampaignFailure {
  std::string prompt_id;
  std::string error;
};

struct CampaignSummary {
  std::size_t planned = 0;   // size of the prompt grid
  std::size_t skipped = 0;   // already answered in the store
  std::size_t issued = 0;
  std::size_t answered = 0;  // exchanges stored
  std::size_t records = 0;   // LLM annotation records written
  std::vector<CampaignFailure> failures;  // sorted by prompt id
};

// The prompt grid in issue order: sentence-major, then feature, then
// property for V2. Throws for unknown ids or non-manual features.
std::vector<PromptSpec> PlanPrompts(const Taxonomy& taxonomy, const Corpus& corpus,
                                    const CampaignSpec& spec);

// Checkpoint key for a prompt under a model and temperature.
ExchangeKey KeyFor(const PromptSpec& prompt, const std::string& model, double temperature);

// Issues every prompt of the grid not yet answered for this model and
// temperature, storing the exchange and the derived LLM annotation record.
// Per-prompt failures are collected and the campaign continues; failed
// prompts leave no checkpoint and are retried by the next run.
CampaignSummary RunCampaign(AnnotationStore& store, const Corpus& corpus, Gateway& gateway,
                            const ModelProfile& model, const CampaignSpec& spec);

std::string RenderCampaignSummary(const CampaignSummary& summary);

}  // namespace rhetann

#endif  // RHETANN_CAMPAIGN_H_
