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

#include "rhetann/cost.h"

#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

namespace {

void RequireNonNegative(std::int64_t v, const char* name) {
  if (v < 0) throw InvalidArgument(std::string(name) + " must be non-negative");
}

}  // namespace

CostEstimate EstimateCost(const Plan& plan, const ModelProfile& model) {
  RequireNonNegative(plan.n_sentences, "n_sentences");
  RequireNonNegative(plan.items_per_sentence, "items_per_sentence");
  RequireNonNegative(plan.prompts_per_item, "prompts_per_item");
  RequireNonNegative(plan.repetitions, "repetitions");
  RequireNonNegative(plan.avg_tokens_in, "avg_tokens_in");
  RequireNonNegative(plan.avg_tokens_out, "avg_tokens_out");

  CostEstimate est;
  est.calls = plan.n_sentences * plan.items_per_sentence * plan.prompts_per_item *
              plan.repetitions;
  const std::int64_t tokens_in = est.calls * plan.avg_tokens_in;
  const std::int64_t tokens_out = est.calls * plan.avg_tokens_out;
  est.lines.push_back({model.name + " input tokens", tokens_in, model.price_in.Cost(tokens_in)});
  est.lines.push_back(
      {model.name + " output tokens", tokens_out, model.price_out.Cost(tokens_out)});
  for (const CostLine& l : est.lines) est.total += l.amount;
  return est;
}

CostEstimate EstimateCost(const Plan& plan, const std::vector<ModelProfile>& models) {
  for (const ModelProfile& m : models) {
    if (m.name == plan.model) return EstimateCost(plan, m);
  }
  throw NotFound("unknown model '" + plan.model + "'");
}

double CostRatio(Money numerator, Money denominator) {
  const std::int64_t n = numerator.nanos();
  const std::int64_t d = denominator.nanos();
  if (d == 0) throw InvalidArgument("cost ratio with a zero denominator");
  if (n % d == 0) return static_cast<double>(n / d);
  return static_cast<double>(n) / static_cast<double>(d);
}

CostEstimate EstimateHumanCost(const HumanPlan& plan) {
  RequireNonNegative(plan.n_sentences, "n_sentences");
  RequireNonNegative(plan.experts, "experts");
  if (plan.price_per_sentence < Money()) {
    throw InvalidArgument("price_per_sentence must be non-negative");
  }
  CostEstimate est;
  const std::int64_t judgements = plan.n_sentences * plan.experts;
  est.lines.push_back({"expert sentence judgements", judgements,
                       plan.price_per_sentence * judgements});
  est.total = est.lines.back().amount;
  return est;
}

PlanDocument ParsePlan(const std::string& text, Money default_human_price) {
  PlanDocument doc;
  try {
    const Json j = Json::parse(text);
    doc.human = j.value("mode", "llm") == "human";
    if (doc.human) {
      doc.people.n_sentences = j.at("n_sentences").get<std::int64_t>();
      doc.people.experts = j.value("experts", std::int64_t{3});
      doc.people.price_per_sentence = j.contains("price_per_sentence")
                                          ? Money::FromDollars(j["price_per_sentence"].get<double>())
                                          : default_human_price;
    } else {
      doc.llm.model = j.at("model").get<std::string>();
      doc.llm.n_sentences = j.at("n_sentences").get<std::int64_t>();
      doc.llm.items_per_sentence = j.value("items_per_sentence", std::int64_t{1});
      doc.llm.prompts_per_item = j.value("prompts_per_item", std::int64_t{1});
      doc.llm.repetitions = j.value("repetitions", std::int64_t{1});
      doc.llm.avg_tokens_in = j.at("avg_tokens_in").get<std::int64_t>();
      doc.llm.avg_tokens_out = j.at("avg_tokens_out").get<std::int64_t>();
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("plan: ") + e.what());
  }
  return doc;
}

std::string RenderEstimate(const CostEstimate& estimate) {
  std::string out;
  for (const CostLine& l : estimate.lines) {
    out += l.label + "\t" + std::to_string(l.quantity) + "\t" + l.amount.ToString() + "\n";
  }
  if (estimate.calls > 0) out += "calls\t" + std::to_string(estimate.calls) + "\n";
  out += "total\t" + estimate.total.ToString() + "\n";
  return out;
}

}  // namespace rhetann
