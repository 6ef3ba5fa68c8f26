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

#include "rhetann/gateway.h"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "httplib.h"
#include "rhetann/error.h"
#include "rhetann/json_codec.h"
#include "testing/fixtures.h"

namespace rhetann {
namespace {

using std::chrono::milliseconds;

ModelProfile Gpt4() {
  return {"gpt-4", TokenPrice{30000}, TokenPrice{60000}, 8192, ModelKind::kBase};
}

class GatewayTest : public ::testing::Test {
 protected:
  std::unique_ptr<Gateway> Make(std::shared_ptr<ChatTransport> transport, int concurrency = 4) {
    auto g = std::make_unique<Gateway>(std::move(transport), taxonomy_, concurrency);
    g->set_sleep([this](milliseconds d) { sleeps_.push_back(d); });
    g->set_clock(testing::SteppingClock());
    return g;
  }
  std::shared_ptr<const Taxonomy> taxonomy_ = testing::SharedTaxonomy();
  PromptSpec spec_ = BuildV1(*taxonomy_, "aspect", "Rover eats bones.", "s1");
  std::vector<milliseconds> sleeps_;
};

TEST_F(GatewayTest, SuccessfulCallIsLedgered) {
  auto g = Make(std::make_shared<FunctionTransport>([](const ChatRequest& r) {
    EXPECT_EQ(r.model, "gpt-4");
    EXPECT_EQ(r.system_text, std::string(kSystemPersona));
    return ChatReply{R"({"Properties": ["simple"], "Explanation": "e"})", 1000, 500};
  }));
  const auto responses = g->Complete(spec_, Gpt4(), CallPolicy::Production());
  ASSERT_EQ(responses.size(), 1u);
  EXPECT_EQ(responses[0].parsed->properties, (PropertySet{"simple"}));
  const auto ledger = g->Ledger();
  ASSERT_EQ(ledger.size(), 1u);
  EXPECT_EQ(ledger[0].prompt_id, "s1/aspect/v1");
  EXPECT_EQ(ledger[0].outcome, CallOutcome::kOk);
  EXPECT_EQ(ledger[0].attempts, 1);
  // 1000 * $0.03/1K + 500 * $0.06/1K = $0.06
  EXPECT_EQ(ledger[0].cost, Money::FromDollars(0.06));
  EXPECT_EQ(g->TotalCost(), LedgerTotal(ledger));
}

TEST_F(GatewayTest, RetriesWithBackoffThenSucceeds) {
  auto g = Make(MakeFlakyTransport(MakeCannedTransport(R"({"Properties": [], "Explanation": ""})"),
                                   2));
  const auto responses = g->Complete(spec_, Gpt4(), CallPolicy::Production());
  ASSERT_EQ(responses.size(), 1u);
  EXPECT_EQ(sleeps_, (std::vector<milliseconds>{milliseconds(200), milliseconds(800)}));
  const auto ledger = g->Ledger();
  ASSERT_EQ(ledger.size(), 1u);
  EXPECT_EQ(ledger[0].outcome, CallOutcome::kRetriedOk);
  EXPECT_EQ(ledger[0].attempts, 3);
  EXPECT_GT(ledger[0].input_tokens, 0);  // estimated when the transport does not report
}

TEST_F(GatewayTest, ExhaustionThrowsTransportError) {
  auto g = Make(MakeFlakyTransport(MakeCannedTransport("{}"), 100));
  try {
    g->Complete(spec_, Gpt4(), CallPolicy::Production());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_EQ(sleeps_.size(), 3u);
  EXPECT_EQ(sleeps_.back(), milliseconds(3200));
  const auto ledger = g->Ledger();
  ASSERT_EQ(ledger.size(), 1u);
  EXPECT_EQ(ledger[0].outcome, CallOutcome::kFailed);
  EXPECT_EQ(ledger[0].attempts, 4);
  EXPECT_EQ(ledger[0].cost, Money());
}

TEST_F(GatewayTest, AuthErrorsAreNotRetried) {
  std::atomic<int> calls{0};
  auto g = Make(std::make_shared<FunctionTransport>([&](const ChatRequest&) -> ChatReply {
    ++calls;
    throw AuthError("bad key");
  }));
  try {
    g->Complete(spec_, Gpt4(), CallPolicy::Consistency(0.2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuth);
  }
  EXPECT_EQ(calls.load(), 1);
  EXPECT_TRUE(sleeps_.empty());
  EXPECT_EQ(g->Ledger().size(), 1u);
}

TEST_F(GatewayTest, ContextOverflowBeforeAnyCall) {
  std::atomic<int> calls{0};
  auto g = Make(std::make_shared<FunctionTransport>([&](const ChatRequest&) {
    ++calls;
    return ChatReply{};
  }));
  ModelProfile tiny = Gpt4();
  tiny.max_context = 10;
  try {
    g->Complete(spec_, tiny, CallPolicy::Production());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContextOverflow);
  }
  EXPECT_EQ(calls.load(), 0);
  EXPECT_TRUE(g->Ledger().empty());
}

TEST_F(GatewayTest, RepetitionsAreIndependentRequests) {
  std::vector<int> reps;
  std::mutex mu;
  auto g = Make(std::make_shared<FunctionTransport>([&](const ChatRequest& r) {
    std::lock_guard lock(mu);
    reps.push_back(r.repetition);
    EXPECT_DOUBLE_EQ(r.temperature, 0.7);
    return ChatReply{"{}", 1, 1};
  }));
  const auto responses = g->Complete(spec_, Gpt4(), CallPolicy::Consistency(0.7));
  EXPECT_EQ(responses.size(), 3u);
  EXPECT_EQ(reps, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(g->Ledger().size(), 3u);
}

TEST_F(GatewayTest, ConcurrencyIsBounded) {
  auto inner = std::make_shared<InstrumentedTransport>(MakeCannedTransport("{}"),
                                                       std::chrono::microseconds(2000));
  auto g = Make(inner, 3);
  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) {
    threads.emplace_back([&] { g->Complete(spec_, Gpt4(), CallPolicy::Production()); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(inner->calls(), 12);
  EXPECT_LE(inner->peak_in_flight(), 3);
  EXPECT_GE(inner->peak_in_flight(), 2);
}

TEST_F(GatewayTest, LedgerSinkSeesEveryEntry) {
  std::vector<UsageLedgerEntry> seen;
  auto g = Make(MakeFlakyTransport(MakeCannedTransport("{}"), 1));
  g->set_ledger_sink([&](const UsageLedgerEntry& e) { seen.push_back(e); });
  g->Complete(spec_, Gpt4(), CallPolicy::Consistency(0.0));
  EXPECT_EQ(seen, g->Ledger());
}

TEST_F(GatewayTest, HashingMockIsDeterministicAndNoisyVaries) {
  const auto plain = MakeHashingTransport(taxonomy_, 7);
  ChatRequest r{"m", 0.0, spec_.system_text, spec_.user_text, &spec_, 0};
  const ChatReply a = plain->Send(r);
  r.repetition = 2;
  EXPECT_EQ(plain->Send(r).content, a.content);
  EXPECT_TRUE(ParseResponse(*taxonomy_, spec_, a.content).violations.empty());

  const auto noisy = MakeHashingTransport(taxonomy_, 7, true);
  bool differed = false;
  for (int i = 0; i < 30 && !differed; ++i) {
    const PromptSpec s = BuildV1(*taxonomy_, "mood", "sentence " + std::to_string(i));
    ChatRequest q{"m", 1.0, s.system_text, s.user_text, &s, 0};
    const std::string first = noisy->Send(q).content;
    for (int rep = 1; rep < 3; ++rep) {
      q.repetition = rep;
      differed |= noisy->Send(q).content != first;
    }
  }
  EXPECT_TRUE(differed);
}

TEST(TokenTest, EstimateAndPromptId) {
  EXPECT_EQ(EstimateTokens(""), 0);
  EXPECT_EQ(EstimateTokens("abcd"), 1);
  EXPECT_EQ(EstimateTokens("abcde"), 2);
  const PromptSpec v2 = BuildV2(ShippedTaxonomy(), "aspect", "perfect", "x", "s9");
  EXPECT_EQ(PromptId(v2), "s9/aspect/v2/perfect");
}

class HttpTransportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_auth_ = req.get_header_value("Authorization");
      last_body_ = Json::parse(req.body);
      res.status = status_;
      res.set_content(body_, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  std::string Url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int status_ = 200;
  std::string body_ =
      R"({"choices":[{"message":{"role":"assistant","content":"{\"Properties\":[]}"}}],)"
      R"("usage":{"prompt_tokens":12,"completion_tokens":3}})";
  std::string last_auth_;
  Json last_body_;
};

TEST_F(HttpTransportTest, PostsChatCompletion) {
  HttpChatTransport t(Url(), "sk-test", std::chrono::seconds(5));
  const ChatReply r = t.Send({"gpt-4", 0.2, "sys", "usr", nullptr, 0});
  EXPECT_EQ(r.content, R"({"Properties":[]})");
  EXPECT_EQ(r.input_tokens, 12);
  EXPECT_EQ(r.output_tokens, 3);
  EXPECT_EQ(last_auth_, "Bearer sk-test");
  EXPECT_EQ(last_body_["model"], "gpt-4");
  EXPECT_EQ(last_body_["messages"][0]["role"], "system");
  EXPECT_EQ(last_body_["messages"][1]["content"], "usr");
}

TEST_F(HttpTransportTest, StatusMapping) {
  HttpChatTransport t(Url(), "k", std::chrono::seconds(5));
  status_ = 401;
  try {
    t.Send({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAuth);
  }
  status_ = 503;
  try {
    t.Send({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  status_ = 200;
  body_ = "{}";
  EXPECT_THROW(t.Send({}), Error);
  EXPECT_THROW(HttpChatTransport("not a url", ""), Error);
}

}  // namespace
}  // namespace rhetann
