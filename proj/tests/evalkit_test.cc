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

#include "rhetann/evalkit.h"

#include <gtest/gtest.h>

#include "rhetann/campaign.h"
#include "testing/fixtures.h"

namespace rhetann {
namespace {

using testing::At;
using testing::Record;

TEST(ConsensusTest, IsConsensus) {
  EXPECT_TRUE(IsConsensus({"s", {PropertySet{"a"}, PropertySet{"a"}}}));
  EXPECT_TRUE(IsConsensus({"s", {PropertySet{}, PropertySet{}}}));
  EXPECT_FALSE(IsConsensus({"s", {PropertySet{"a"}, PropertySet{"a", "b"}}}));
  EXPECT_FALSE(IsConsensus({"s", {PropertySet{"a"}, std::nullopt}}));
}

class EvalkitTest : public ::testing::Test {
 protected:
  void SetUp() override { store_ = std::make_unique<AnnotationStore>(taxonomy_, corpus_); }

  std::shared_ptr<const Taxonomy> taxonomy_ = testing::SharedTaxonomy();
  std::shared_ptr<const Corpus> corpus_ = testing::SyntheticCorpus(40);
  std::unique_ptr<AnnotationStore> store_;
};

TEST_F(EvalkitTest, SelectConsensusSamplesWithSeed) {
  // Odd sentences agree on {simple}, every fourth on nothing, the rest disagree.
  for (std::size_t i = 1; i <= 40; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "s%04zu", i);
    const PropertySet a = i % 4 == 0 ? PropertySet{} : PropertySet{"simple"};
    const PropertySet b = i % 2 == 1 || i % 4 == 0 ? a : PropertySet{"perfect"};
    store_->Submit(Record(id, "h1", "aspect", a));
    store_->Submit(Record(id, "h2", "aspect", b));
  }
  const auto view = store_->Snapshot();
  ConsensusOptions o;
  o.k = 10;
  o.seed = 3;
  const ConsensusSelection s = SelectConsensus(*view, "aspect", {"h1", "h2"}, o);
  EXPECT_EQ(s.available, 30u);
  EXPECT_EQ(s.sentence_ids.size(), 10u);
  EXPECT_FALSE(s.shortfall.has_value());
  EXPECT_TRUE(std::is_sorted(s.sentence_ids.begin(), s.sentence_ids.end()));
  EXPECT_EQ(SelectConsensus(*view, "aspect", {"h1", "h2"}, o).sentence_ids, s.sentence_ids);
  o.seed = 4;
  EXPECT_NE(SelectConsensus(*view, "aspect", {"h1", "h2"}, o).sentence_ids, s.sentence_ids);

  o.k = 30;
  o.exclude_empty = true;
  const ConsensusSelection short_sel = SelectConsensus(*view, "aspect", {"h1", "h2"}, o);
  EXPECT_EQ(short_sel.available, 20u);
  EXPECT_EQ(short_sel.sentence_ids.size(), 20u);
  ASSERT_TRUE(short_sel.shortfall.has_value());
  EXPECT_NE(short_sel.shortfall->find("20"), std::string::npos);

  const ConsensusSelection none = SelectConsensus(*view, "mood", {"h1", "h2"}, o);
  EXPECT_TRUE(none.sentence_ids.empty());
  EXPECT_TRUE(none.shortfall.has_value());
  EXPECT_THROW(SelectConsensus(*view, "aspect", {"h1"}, o), Error);
}

TEST(ScoreTest, ModesAndCoverage) {
  const Feature& f = testing::SharedTaxonomy()->GetFeature("aspect");
  const std::vector<GroundTruthLabel> gold = {
      {"s1", "aspect", {"simple"}, "x", "", At(0)},
      {"s2", "aspect", {}, "x", "", At(0)},
  };
  const std::map<std::string, PropertySet> pred = {{"s1", {"simple", "perfect"}}, {"s2", {}}};
  const AccuracyCell exact = Score(f, pred, gold, ScoreMode::kExactSet);
  EXPECT_EQ(exact.correct, 1u);
  EXPECT_EQ(exact.n, 2u);
  EXPECT_EQ(*exact.accuracy(), 0.5);
  const AccuracyCell per = Score(f, pred, gold, ScoreMode::kPerProperty);
  EXPECT_EQ(per.correct, 7u);
  EXPECT_EQ(per.n, 8u);
  EXPECT_FALSE(AccuracyCell{}.accuracy().has_value());

  try {
    Score(f, {{"s1", {}}, {"s9", {}}}, gold, ScoreMode::kExactSet);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_NE(std::string(e.what()).find("s2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("s9"), std::string::npos);
  }
}

TEST(ScoreTest, Aggregate) {
  const std::vector<AccuracyCell> cells = {{1, 1}, {1, 3}, {0, 0}};
  EXPECT_DOUBLE_EQ(*Aggregate(cells, AggregateMode::kMacro), (1.0 + 1.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(*Aggregate(cells, AggregateMode::kMicro), 0.5);
  EXPECT_FALSE(Aggregate({{0, 0}}, AggregateMode::kMicro).has_value());
  EXPECT_FALSE(Aggregate({}, AggregateMode::kMacro).has_value());
}

TEST_F(EvalkitTest, ScoreStoreWithHumanAndLlmColumns) {
  testing::Annotate(*store_, *corpus_, {"h1", "h2"}, {"aspect", "mood"},
                    [](const std::string&, const Sentence&, const Feature& f) {
                      return PropertySet{f.properties.front().id};
                    });
  const ModelProfile model{"gpt-4", TokenPrice{30000}, TokenPrice{60000}};
  Gateway g(MakeHashingTransport(taxonomy_, 3), taxonomy_, 4);
  CampaignSpec spec;
  spec.feature_ids = {"aspect"};
  spec.sentence_ids = {"s0001", "s0002", "s0003"};
  spec.clock = testing::SteppingClock();
  RunCampaign(*store_, *corpus_, g, model, spec);
  for (const char* id : {"s0001", "s0002", "s0003"}) {
    store_->PutGroundTruth({id, "aspect", {"simple"}, "x", "", At(0)});
  }
  const auto view = store_->Snapshot();
  const auto systems = DefaultSystems(*view);
  ASSERT_EQ(systems.size(), 2u);
  EXPECT_EQ(systems[0].name, "Human");
  EXPECT_EQ(systems[1].annotator_id, "llm:gpt-4:v1:0.0");
  const AccuracyReport r = ScoreStore(*view, *taxonomy_, {"aspect", "mood"}, {"h1", "h2"}, systems);
  // mood has no ground truth and is skipped.
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].cells.at("Human").correct, 3u);
  EXPECT_EQ(*r.Aggregate("Human", AggregateMode::kMicro), 1.0);
  const std::string table = RenderAccuracyTable(r);
  EXPECT_EQ(table.rfind("| Feature | Human | llm:gpt-4:v1:0.0 |\n|---|---|---|\n", 0), 0u);
  EXPECT_NE(table.find("| Aspect | 1.000 (n=3) |"), std::string::npos);
  EXPECT_NE(table.find("| All features (micro) | 1.000 |"), std::string::npos);
  EXPECT_NE(table.find("| All features (macro) | 1.000 |"), std::string::npos);

  // A gold sentence without human consensus is a coverage mismatch.
  store_->PutGroundTruth({"s0004", "aspect", {"simple"}, "x", "", At(0)});
  store_->Submit(Record("s0004", "h2", "aspect", {"perfect"}, 1000000));
  EXPECT_THROW(ScoreStore(*store_->Snapshot(), *taxonomy_, {"aspect"}, {"h1", "h2"},
                          {{"Human", "", ScoreMode::kExactSet}}),
               Error);
}

TEST_F(EvalkitTest, SummarizeErrorsByScope) {
  const ModelProfile model{"gpt-4", TokenPrice{1}, TokenPrice{1}};
  Gateway g(MakeHashingTransport(taxonomy_, 3), taxonomy_, 2);
  CampaignSpec spec;
  spec.feature_ids = {"aspect", "mood"};
  spec.sentence_ids = {"s0001"};
  spec.clock = testing::SteppingClock();
  RunCampaign(*store_, *corpus_, g, model, spec);
  const auto exchanges = store_->Snapshot()->Exchanges();
  ASSERT_EQ(exchanges.size(), 2u);
  for (const AssistantExchange& e : exchanges) {
    store_->AppendErrorTag({e.id,
                            e.feature_id == "aspect" ? ErrorCategory::kHallucinating
                                                     : ErrorCategory::kConfounding,
                            "r", "t", At(0)});
  }
  EXPECT_THROW(store_->AppendErrorTag({"nope", ErrorCategory::kOther, "", "t", At(0)}), Error);
  const auto view = store_->Snapshot();
  const auto all = SummarizeErrors(*view);
  EXPECT_EQ(all.size(), std::size(kAllErrorCategories));
  EXPECT_EQ(all.at(ErrorCategory::kHallucinating), 1u);
  EXPECT_EQ(all.at(ErrorCategory::kConfounding), 1u);
  const auto aspect = SummarizeErrors(*view, {std::string("aspect"), std::nullopt});
  EXPECT_EQ(aspect.at(ErrorCategory::kConfounding), 0u);
  EXPECT_EQ(aspect.at(ErrorCategory::kHallucinating), 1u);
  const auto other = SummarizeErrors(*view, {std::nullopt, std::string("gpt-3.5")});
  EXPECT_EQ(other.at(ErrorCategory::kHallucinating), 0u);
  EXPECT_FALSE(RenderErrorSummary(all).empty());
}

}  // namespace
}  // namespace rhetann
