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

#ifndef RHETANN_COST_H_
#define RHETANN_COST_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rhetann/gateway.h"
#include "rhetann/money.h"

namespace rhetann {

// Inputs to an LLM cost estimate. Token averages are per call and must be
// supplied; nothing is assumed about prompt length.
struct Plan {
  std::string model;
  std::int64_t n_sentences = 0;
  std::int64_t items_per_sentence = 1;  // features (V1) or properties (V2)
  std::int64_t prompts_per_item = 1;
  std::int64_t repetitions = 1;
  std::int64_t avg_tokens_in = 0;
  std::int64_t avg_tokens_out = 0;
};

struct HumanPlan {
  std::int64_t n_sentences = 0;
  std::int64_t experts = 3;
  Money price_per_sentence;
};

struct CostLine {
  std::string label;
  std::int64_t quantity = 0;
  Money amount;
};

struct CostEstimate {
  std::vector<CostLine> lines;
  Money total;
  std::int64_t calls = 0;
};

// Throws InvalidArgument on negative counts.
CostEstimate EstimateCost(const Plan& plan, const ModelProfile& model);
// Throws NotFound if the plan names a model that is not configured.
CostEstimate EstimateCost(const Plan& plan, const std::vector<ModelProfile>& models);
CostEstimate EstimateHumanCost(const HumanPlan& plan);

// numerator / denominator, computed on nanos. Exact when one is an integer
// multiple of the other. Throws InvalidArgument for a zero denominator.
double CostRatio(Money numerator, Money denominator);

// Plan files are JSON objects. {"mode": "human", ...} selects HumanPlan;
// anything else is an LLM plan. Missing price_per_sentence falls back to
// `default_human_price`.
struct PlanDocument {
  bool human = false;
  Plan llm;
  HumanPlan people;
};
PlanDocument ParsePlan(const std::string& text, Money default_human_price);

std::string RenderEstimate(const CostEstimate& estimate);

}  // namespace rhetann

#endif  // RHETANN_COST_H_
