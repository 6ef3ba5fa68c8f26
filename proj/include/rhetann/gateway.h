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

#ifndef RHETANN_GATEWAY_H_
#define RHETANN_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/money.h"
#include "rhetann/prompt.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

enum class ModelKind { kBase, kFineTuned };

const char* ModelKindName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

struct ModelProfile {
  std::string name;
  TokenPrice price_in;   // per 1K input tokens
  TokenPrice price_out;  // per 1K output tokens
  std::int64_t max_context = 8192;
  ModelKind kind = ModelKind::kBase;

  Money Cost(std::int64_t input_tokens, std::int64_t output_tokens) const {
    return price_in.Cost(input_tokens) + price_out.Cost(output_tokens);
  }
  bool operator==(const ModelProfile&) const = default;
};

struct CallPolicy {
  double temperature = 0.0;
  int repetitions = 1;
  int max_retries = 3;
  // Delay before retry i; the last entry repeats.
  std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(200),
                                                    std::chrono::milliseconds(800),
                                                    std::chrono::milliseconds(3200)};
  ParseOptions parse;

  // One call at temperature 0.
  static CallPolicy Production();
  // Three repetitions, for consistency studies.
  static CallPolicy Consistency(double temperature);
};

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::string system_text;
  std::string user_text;
  // Not sent on the wire; lets mocks key their output on the prompt.
  const PromptSpec* spec = nullptr;
  int repetition = 0;
};

struct ChatReply {
  std::string content;
  std::int64_t input_tokens = 0;   // 0 when the transport does not report
  std::int64_t output_tokens = 0;
};

// Transport failures. Auth errors carry ErrorCode::kAuth and are not retried.
inline Error TransportError(const std::string& m) { return Error(ErrorCode::kTransport, m); }
inline Error AuthError(const std::string& m) { return Error(ErrorCode::kAuth, m); }

class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatReply Send(const ChatRequest& request) = 0;
};

// Chat-completions JSON over HTTP(S):
// POST <endpoint> {"model", "temperature", "n": 1, "messages": [...]}.
class HttpChatTransport : public ChatTransport {
 public:
  // `endpoint` is a full URL such as https://api.example.com/v1/chat/completions.
  HttpChatTransport(std::string endpoint, std::string api_key,
                    std::chrono::seconds timeout = std::chrono::seconds(60));
  ChatReply Send(const ChatRequest& request) override;

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

class FunctionTransport : public ChatTransport {
 public:
  explicit FunctionTransport(std::function<ChatReply(const ChatRequest&)> fn)
      : fn_(std::move(fn)) {}
  ChatReply Send(const ChatRequest& request) override { return fn_(request); }

 private:
  std::function<ChatReply(const ChatRequest&)> fn_;
};

// Always returns the same content.
std::shared_ptr<ChatTransport> MakeCannedTransport(std::string content);

// Deterministic stand-in for a model: the reply is a well-formed answer whose
// property choice is a hash of the prompt bytes and `seed`. With `noisy`, the
// repetition index also enters the hash, so repeated calls disagree.
std::shared_ptr<ChatTransport> MakeHashingTransport(std::shared_ptr<const Taxonomy> taxonomy,
                                                    std::uint64_t seed, bool noisy = false);

// Fails the first `failures` calls with a transport error, then delegates.
std::shared_ptr<ChatTransport> MakeFlakyTransport(std::shared_ptr<ChatTransport> inner,
                                                  int failures);

// Counts concurrent Send calls and remembers the peak.
class InstrumentedTransport : public ChatTransport {
 public:
  InstrumentedTransport(std::shared_ptr<ChatTransport> inner,
                        std::chrono::microseconds latency = std::chrono::microseconds(0));
  ChatReply Send(const ChatRequest& request) override;

  int peak_in_flight() const { return peak_.load(); }
  std::int64_t calls() const { return calls_.load(); }

 private:
  std::shared_ptr<ChatTransport> inner_;
  std::chrono::microseconds latency_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  std::atomic<std::int64_t> calls_{0};
};

// Approximate token count: ceil(chars / 4).
std::int64_t EstimateTokens(std::string_view text);

// Stable id for one prompt: "<sentence>/<feature>/<version>[/<property>]".
std::string PromptId(const PromptSpec& spec);

// Thread-safe handle over a transport with a bound on in-flight requests.
class Gateway {
 public:
  using TokenCounter = std::function<std::int64_t(std::string_view)>;
  using LedgerSink = std::function<void(const UsageLedgerEntry&)>;

  Gateway(std::shared_ptr<ChatTransport> transport, std::shared_ptr<const Taxonomy> taxonomy,
          int concurrency = 8);

  // Issues policy.repetitions independent requests. Every repetition gets one
  // ledger entry. Returns the successful responses in repetition order; throws
  // a transport (or auth) error if none succeeded, and ContextOverflow before
  // any request if the prompt estimate exceeds the model window.
  std::vector<LlmResponse> Complete(const PromptSpec& spec, const ModelProfile& model,
                                    const CallPolicy& policy);

  void set_token_counter(TokenCounter counter) { token_counter_ = std::move(counter); }
  void set_sleep(std::function<void(std::chrono::milliseconds)> sleep) {
    sleep_ = std::move(sleep);
  }
  void set_clock(Clock clock) { clock_ = std::move(clock); }
  // Called once per ledger entry, serialized.
  void set_ledger_sink(LedgerSink sink) { sink_ = std::move(sink); }

  std::vector<UsageLedgerEntry> Ledger() const;
  Money TotalCost() const;
  int concurrency() const { return concurrency_; }

 private:
  void Record(UsageLedgerEntry entry);

  std::shared_ptr<ChatTransport> transport_;
  std::shared_ptr<const Taxonomy> taxonomy_;
  int concurrency_;
  std::counting_semaphore<> slots_;
  TokenCounter token_counter_;
  std::function<void(std::chrono::milliseconds)> sleep_;
  Clock clock_;
  LedgerSink sink_;

  mutable std::mutex ledger_mu_;
  std::vector<UsageLedgerEntry> ledger_;
};

// Sum of ledger costs; replaying a stored ledger reproduces the gateway total.
Money LedgerTotal(const std::vector<UsageLedgerEntry>& ledger);

}  // namespace rhetann

#endif  // RHETANN_GATEWAY_H_
