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

#include "rhetann/campaign.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "rhetann/error.h"

namespace rhetann {

std::vector<PromptSpec> PlanPrompts(const Taxonomy& taxonomy, const Corpus& corpus,
                                    const CampaignSpec& spec) {
  std::vector<const Feature*> features;
  if (spec.feature_ids.empty()) {
    features = taxonomy.ManualFeatures();
  } else {
    for (const std::string& id : spec.feature_ids) features.push_back(&taxonomy.GetFeature(id));
  }
  if (features.empty()) throw InvalidArgument("campaign scope has no features");

  std::vector<const Sentence*> sentences;
  if (spec.sentence_ids.empty()) {
    for (const Sentence& s : corpus.sentences()) sentences.push_back(&s);
  } else {
    for (const std::string& id : spec.sentence_ids) sentences.push_back(&corpus.Get(id));
  }
  if (sentences.empty()) throw InvalidArgument("campaign scope has no sentences");

  std::vector<PromptSpec> grid;
  for (const Sentence* s : sentences) {
    for (const Feature* f : features) {
      if (spec.version == PromptVersion::kV1) {
        grid.push_back(BuildV1(taxonomy, f->id, s->text, s->id));
      } else {
        for (PromptSpec& p : BuildV2All(taxonomy, f->id, s->text, s->id)) {
          grid.push_back(std::move(p));
        }
      }
    }
  }
  return grid;
}

ExchangeKey KeyFor(const PromptSpec& prompt, const std::string& model, double temperature) {
  return ExchangeKey{prompt.sentence_id,
                     prompt.feature_id,
                     prompt.version,
                     prompt.property_id.value_or(""),
                     model,
                     FormatTemperature(temperature)};
}

namespace {

const LlmResponse* FirstParsed(const AssistantExchange& e) {
  for (const LlmResponse& r : e.responses) {
    if (r.parse_ok()) return &r;
  }
  return nullptr;
}

// V1: the first parsed response. V2: union of "yes" answers over the latest
// stored exchange of every property of the feature, so the newest record
// always carries the full set.
std::optional<AnnotationRecord> DeriveRecord(const Taxonomy& taxonomy, const StoreView& view,
                                             const AssistantExchange& e, Timestamp now) {
  AnnotationRecord rec;
  rec.sentence_id = e.sentence_id;
  rec.annotator = LlmAnnotator(e.model, e.prompt_version, e.temperature);
  rec.feature_id = e.feature_id;
  rec.session_id = "campaign";
  // Never older than the record it supersedes, so latest-wins follows append
  // order even when worker clocks interleave.
  rec.timestamp = now;
  if (auto prev = view.Latest(rec.sentence_id, rec.annotator.id, rec.feature_id)) {
    rec.timestamp = std::max(rec.timestamp, prev->timestamp);
  }
  if (e.prompt_version == PromptVersion::kV1) {
    const LlmResponse* r = FirstParsed(e);
    if (r == nullptr) return std::nullopt;
    rec.properties = r->parsed->properties;
    return rec;
  }
  bool any = false;
  for (const Property& p : taxonomy.GetFeature(e.feature_id).properties) {
    const AssistantExchange* latest = view.LatestExchange(
        ExchangeKey{e.sentence_id, e.feature_id, PromptVersion::kV2, p.id, e.model,
                    FormatTemperature(e.temperature)});
    if (latest == nullptr) continue;
    const LlmResponse* r = FirstParsed(*latest);
    if (r == nullptr) continue;
    any = true;
    if (r->parsed->answer.value_or(false)) rec.properties.insert(p.id);
  }
  if (!any) return std::nullopt;
  return rec;
}

}  // namespace

CampaignSummary RunCampaign(AnnotationStore& store, const Corpus& corpus, Gateway& gateway,
                            const ModelProfile& model, const CampaignSpec& spec) {
  const Taxonomy& taxonomy = store.taxonomy();
  const std::vector<PromptSpec> grid = PlanPrompts(taxonomy, corpus, spec);
  CampaignSummary summary;
  summary.planned = grid.size();

  std::vector<const PromptSpec*> todo;
  for (const PromptSpec& p : grid) {
    if (store.HasExchange(KeyFor(p, model.name, spec.policy.temperature))) {
      ++summary.skipped;
    } else if (spec.max_prompts == 0 || todo.size() < spec.max_prompts) {
      todo.push_back(&p);
    }
  }
  summary.issued = todo.size();

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const PromptSpec& prompt = *todo[i];
      try {
        AssistantExchange e;
        e.sentence_id = prompt.sentence_id;
        e.feature_id = prompt.feature_id;
        e.prompt_version = prompt.version;
        e.request = prompt;
        e.responses = gateway.Complete(prompt, model, spec.policy);
        e.model = model.name;
        e.temperature = spec.policy.temperature;
        e.timestamp = spec.clock();
        bool unparsed = FirstParsed(e) == nullptr;
        auto [id, revision] = store.AppendExchangeAndDerive(
            std::move(e), [&](const StoreView& view, const AssistantExchange& stored) {
              return DeriveRecord(taxonomy, view, stored, spec.clock());
            });
        std::lock_guard lock(mu);
        ++summary.answered;
        if (revision) ++summary.records;
        if (unparsed) summary.failures.push_back({PromptId(prompt), "no parseable response"});
      } catch (const std::exception& ex) {
        std::lock_guard lock(mu);
        summary.failures.push_back({PromptId(prompt), ex.what()});
      }
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(gateway.concurrency()), todo.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (std::thread& t : threads) t.join();

  std::sort(summary.failures.begin(), summary.failures.end(),
            [](const auto& a, const auto& b) { return a.prompt_id < b.prompt_id; });
  return summary;
}

std::string RenderCampaignSummary(const CampaignSummary& s) {
  std::string out = "planned " + std::to_string(s.planned) + ", skipped " +
                    std::to_string(s.skipped) + ", issued " + std::to_string(s.issued) +
                    ", answered " + std::to_string(s.answered) + ", records " +
                    std::to_string(s.records) + ", failures " +
                    std::to_string(s.failures.size()) + "\n";
  for (const CampaignFailure& f : s.failures) out += "  failed " + f.prompt_id + ": " + f.error + "\n";
  return out;
}

}  // namespace rhetann
