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

#include <gtest/gtest.h>

#include "rhetann/agreement.h"
#include "testing/fixtures.h"

namespace rhetann {
namespace {

const ModelProfile kModel{"gpt-4", TokenPrice{30000}, TokenPrice{60000}};

class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    store_ = std::make_unique<AnnotationStore>(taxonomy_, corpus_);
  }
  std::unique_ptr<Gateway> MakeGateway(std::shared_ptr<ChatTransport> t, int concurrency = 4) {
    auto g = std::make_unique<Gateway>(std::move(t), taxonomy_, concurrency);
    g->set_sleep([](std::chrono::milliseconds) {});
    AnnotationStore* s = store_.get();
    g->set_ledger_sink([s](const UsageLedgerEntry& e) { s->AppendUsage(e); });
    return g;
  }
  CampaignSpec Spec(PromptVersion v) {
    CampaignSpec spec;
    spec.version = v;
    spec.feature_ids = {"aspect"};
    spec.clock = testing::SteppingClock();
    return spec;
  }

  std::shared_ptr<const Taxonomy> taxonomy_ = testing::SharedTaxonomy();
  std::shared_ptr<const Corpus> corpus_ = testing::SyntheticCorpus(10);
  std::unique_ptr<AnnotationStore> store_;
};

TEST_F(CampaignTest, GridSizes) {
  EXPECT_EQ(PlanPrompts(*taxonomy_, *corpus_, Spec(PromptVersion::kV1)).size(), 10u);
  const auto v2 = PlanPrompts(*taxonomy_, *corpus_, Spec(PromptVersion::kV2));
  ASSERT_EQ(v2.size(), 40u);
  // Sentence-major, then property.
  EXPECT_EQ(v2[0].sentence_id, "s0001");
  EXPECT_EQ(*v2[0].property_id, "simple");
  EXPECT_EQ(*v2[3].property_id, "perfect-progressive");
  EXPECT_EQ(v2[4].sentence_id, "s0002");
  CampaignSpec all;
  EXPECT_EQ(PlanPrompts(*taxonomy_, *corpus_, all).size(), 10u * taxonomy_->ManualFeatures().size());
  CampaignSpec bad = Spec(PromptVersion::kV1);
  bad.feature_ids = {"language-of-origin"};
  EXPECT_THROW(PlanPrompts(*taxonomy_, *corpus_, bad), Error);
  bad.feature_ids = {"aspect"};
  bad.sentence_ids = {"s9999"};
  EXPECT_THROW(PlanPrompts(*taxonomy_, *corpus_, bad), Error);
}

TEST_F(CampaignTest, V1RunIsIdempotent) {
  auto inner = std::make_shared<InstrumentedTransport>(MakeHashingTransport(taxonomy_, 3));
  auto g = MakeGateway(inner);
  const CampaignSummary first = RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV1));
  EXPECT_EQ(first.planned, 10u);
  EXPECT_EQ(first.issued, 10u);
  EXPECT_EQ(first.answered, 10u);
  EXPECT_EQ(first.records, 10u);
  EXPECT_TRUE(first.failures.empty());
  EXPECT_EQ(inner->calls(), 10);

  const CampaignSummary second = RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV1));
  EXPECT_EQ(second.skipped, 10u);
  EXPECT_EQ(second.issued, 0u);
  EXPECT_EQ(inner->calls(), 10);

  const auto view = store_->Snapshot();
  EXPECT_EQ(view->Exchanges().size(), 10u);
  EXPECT_EQ(view->Usage().size(), 10u);
  const std::string llm = LlmAnnotator("gpt-4", PromptVersion::kV1, 0.0).id;
  EXPECT_EQ(llm, "llm:gpt-4:v1:0.0");
  for (const AssistantExchange& e : view->Exchanges()) {
    const auto rec = view->Latest(e.sentence_id, llm, "aspect");
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->properties, e.responses[0].parsed->properties);
    EXPECT_EQ(rec->annotator.kind, AnnotatorKind::kLlm);
  }
}

TEST_F(CampaignTest, V2RecordIsUnionOfYesAnswers) {
  auto g = MakeGateway(MakeHashingTransport(taxonomy_, 11), 8);
  const CampaignSummary s = RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV2));
  EXPECT_EQ(s.issued, 40u);
  EXPECT_EQ(s.answered, 40u);
  const auto view = store_->Snapshot();
  const std::string llm = LlmAnnotator("gpt-4", PromptVersion::kV2, 0.0).id;
  for (const Sentence& sentence : corpus_->sentences()) {
    PropertySet expected;
    for (const AssistantExchange& e : view->Exchanges()) {
      if (e.sentence_id == sentence.id && e.responses[0].parsed->answer.value_or(false)) {
        expected.insert(*e.property_id());
      }
    }
    const auto rec = view->Latest(sentence.id, llm, "aspect");
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->properties, expected) << sentence.id;
  }
}

TEST_F(CampaignTest, MaxPromptsThenResume) {
  auto g = MakeGateway(MakeHashingTransport(taxonomy_, 1));
  CampaignSpec spec = Spec(PromptVersion::kV2);
  spec.max_prompts = 15;
  const CampaignSummary a = RunCampaign(*store_, *corpus_, *g, kModel, spec);
  EXPECT_EQ(a.issued, 15u);
  spec.max_prompts = 0;
  const CampaignSummary b = RunCampaign(*store_, *corpus_, *g, kModel, spec);
  EXPECT_EQ(b.skipped, 15u);
  EXPECT_EQ(b.issued, 25u);
  EXPECT_EQ(store_->Snapshot()->Exchanges().size(), 40u);
}

TEST_F(CampaignTest, FailedPromptsAreRetriedNextRun) {
  std::atomic<bool> broken{true};
  auto hashing = MakeHashingTransport(taxonomy_, 2);
  auto g = MakeGateway(std::make_shared<FunctionTransport>([&](const ChatRequest& r) {
    if (broken && r.spec->sentence_id == "s0003") throw TransportError("down");
    return hashing->Send(r);
  }));
  const CampaignSummary a = RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV1));
  EXPECT_EQ(a.answered, 9u);
  ASSERT_EQ(a.failures.size(), 1u);
  EXPECT_EQ(a.failures[0].prompt_id, "s0003/aspect/v1");
  broken = false;
  const CampaignSummary b = RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV1));
  EXPECT_EQ(b.issued, 1u);
  EXPECT_EQ(b.answered, 1u);
  // The failed attempts were ledgered: 4 attempts in one failed entry.
  std::size_t failed = 0;
  for (const UsageLedgerEntry& u : store_->Snapshot()->Usage()) {
    if (u.outcome == CallOutcome::kFailed) {
      ++failed;
      EXPECT_EQ(u.attempts, 4);
    }
  }
  EXPECT_EQ(failed, 1u);
}

TEST_F(CampaignTest, ConsistencyUnderDeterministicAndNoisyMocks) {
  for (bool noisy : {false, true}) {
    AnnotationStore store(taxonomy_, corpus_);
    Gateway g(MakeHashingTransport(taxonomy_, 5, noisy), taxonomy_, 4);
    CampaignSpec spec = Spec(PromptVersion::kV1);
    spec.feature_ids = {"aspect", "mood", "tense"};
    spec.policy = CallPolicy::Consistency(1.0);
    RunCampaign(store, *corpus_, g, kModel, spec);
    const auto exchanges = store.Snapshot()->Exchanges();
    double sum = 0.0;
    for (const char* f : {"aspect", "mood", "tense"}) {
      const ConsistencyReport r = IntraLlmConsistency(exchanges, f, "gpt-4", 1.0);
      EXPECT_EQ(r.n_prompts, 10u);
      sum += *r.exact_consistency;
      if (!noisy) {
        EXPECT_EQ(*r.exact_consistency, 1.0) << f;
      }
    }
    if (noisy) {
      EXPECT_LT(sum / 3.0, 1.0);
    }
  }
}

TEST_F(CampaignTest, RespectsGatewayConcurrency) {
  auto inner = std::make_shared<InstrumentedTransport>(MakeHashingTransport(taxonomy_, 4),
                                                       std::chrono::microseconds(1000));
  auto g = MakeGateway(inner, 3);
  RunCampaign(*store_, *corpus_, *g, kModel, Spec(PromptVersion::kV2));
  EXPECT_LE(inner->peak_in_flight(), 3);
  EXPECT_EQ(inner->calls(), 40);
}

TEST(CampaignSummaryTest, Render) {
  CampaignSummary s{4, 1, 3, 2, 2, {{"a/b/v1", "down"}}};
  EXPECT_EQ(RenderCampaignSummary(s),
            "planned 4, skipped 1, issued 3, answered 2, records 2, failures 1\n"
            "  failed a/b/v1: down\n");
}

}  // namespace
}  // namespace rhetann
