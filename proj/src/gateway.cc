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

#include <algorithm>
#include <thread>

#include "httplib.h"
#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

const char* ModelKindName(ModelKind kind) {
  return kind == ModelKind::kFineTuned ? "fine_tuned" : "base";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  if (name == "base") return ModelKind::kBase;
  if (name == "fine_tuned") return ModelKind::kFineTuned;
  return std::nullopt;
}

CallPolicy CallPolicy::Production() { return CallPolicy{}; }

CallPolicy CallPolicy::Consistency(double temperature) {
  CallPolicy p;
  p.temperature = temperature;
  p.repetitions = 3;
  return p;
}

// --- HTTP transport --------------------------------------------------------

HttpChatTransport::HttpChatTransport(std::string endpoint, std::string api_key,
                                     std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw InvalidArgument("endpoint '" + endpoint + "' is not an absolute URL");
  }
  const std::size_t slash = endpoint.find('/', scheme + 3);
  base_ = slash == std::string::npos ? endpoint : endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : endpoint.substr(slash);
}

ChatReply HttpChatTransport::Send(const ChatRequest& request) {
  Json body = {
      {"model", request.model},
      {"temperature", request.temperature},
      {"n", 1},
      {"messages",
       Json::array({{{"role", "system"}, {"content", request.system_text}},
                    {{"role", "user"}, {"content", request.user_text}}})},
  };
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + base_ + path_ + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    const Json j = Json::parse(res->body);
    ChatReply reply;
    reply.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      reply.input_tokens = j["usage"].value("prompt_tokens", 0);
      reply.output_tokens = j["usage"].value("completion_tokens", 0);
    }
    return reply;
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed completion body: ") + e.what());
  }
}

// --- Mocks -----------------------------------------------------------------

namespace {

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Roughly 30% of properties are chosen, which keeps empty answers common.
constexpr std::uint64_t kChoosePercent = 30;

ChatReply WithTokenCounts(const ChatRequest& request, std::string content) {
  ChatReply reply;
  reply.input_tokens = EstimateTokens(request.system_text) + EstimateTokens(request.user_text);
  reply.output_tokens = EstimateTokens(content);
  reply.content = std::move(content);
  return reply;
}

class FlakyTransport : public ChatTransport {
 public:
  FlakyTransport(std::shared_ptr<ChatTransport> inner, int failures)
      : inner_(std::move(inner)), remaining_(failures) {}

  ChatReply Send(const ChatRequest& request) override {
    if (remaining_.fetch_sub(1) > 0) throw TransportError("injected failure");
    return inner_->Send(request);
  }

 private:
  std::shared_ptr<ChatTransport> inner_;
  std::atomic<int> remaining_;
};

}  // namespace

std::shared_ptr<ChatTransport> MakeCannedTransport(std::string content) {
  return std::make_shared<FunctionTransport>(
      [content = std::move(content)](const ChatRequest& r) { return WithTokenCounts(r, content); });
}

std::shared_ptr<ChatTransport> MakeHashingTransport(std::shared_ptr<const Taxonomy> taxonomy,
                                                    std::uint64_t seed, bool noisy) {
  return std::make_shared<FunctionTransport>([taxonomy, seed, noisy](const ChatRequest& r) {
    std::uint64_t h = Fnv1a(r.system_text);
    h = Fnv1a("\n", h);
    h = Fnv1a(r.user_text, h);
    h = SplitMix(h ^ seed);
    if (noisy) h = SplitMix(h ^ static_cast<std::uint64_t>(r.repetition + 1));

    if (r.spec == nullptr || taxonomy == nullptr) {
      return WithTokenCounts(r, R"({"Properties":[],"Explanation":"no prompt metadata"})");
    }
    const Feature& feature = taxonomy->GetFeature(r.spec->feature_id);
    ParsedResponse parsed;
    if (r.spec->version == PromptVersion::kV1) {
      for (std::size_t i = 0; i < feature.properties.size(); ++i) {
        if (SplitMix(h + i) % 100 < kChoosePercent) parsed.properties.insert(feature.properties[i].id);
      }
      parsed.explanation = parsed.properties.empty() ? "None of the properties apply."
                                                     : "The marked properties apply.";
    } else {
      parsed.answer = SplitMix(h) % 100 < kChoosePercent;
      parsed.explanation = *parsed.answer ? "The property is present." : "The property is absent.";
    }
    return WithTokenCounts(r, SerializeParsedResponse(*taxonomy, *r.spec, parsed));
  });
}

std::shared_ptr<ChatTransport> MakeFlakyTransport(std::shared_ptr<ChatTransport> inner,
                                                  int failures) {
  return std::make_shared<FlakyTransport>(std::move(inner), failures);
}

InstrumentedTransport::InstrumentedTransport(std::shared_ptr<ChatTransport> inner,
                                             std::chrono::microseconds latency)
    : inner_(std::move(inner)), latency_(latency) {}

ChatReply InstrumentedTransport::Send(const ChatRequest& request) {
  const int now = ++in_flight_;
  int peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
  ++calls_;
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { --n; }
  } leave{in_flight_};
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  return inner_->Send(request);
}

// --- Gateway ---------------------------------------------------------------

std::int64_t EstimateTokens(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

std::string PromptId(const PromptSpec& spec) {
  std::string id = spec.sentence_id + "/" + spec.feature_id + "/" + PromptVersionName(spec.version);
  if (spec.property_id) id += "/" + *spec.property_id;
  return id;
}

Gateway::Gateway(std::shared_ptr<ChatTransport> transport,
                 std::shared_ptr<const Taxonomy> taxonomy, int concurrency)
    : transport_(std::move(transport)),
      taxonomy_(std::move(taxonomy)),
      concurrency_(concurrency),
      slots_(concurrency),
      token_counter_(EstimateTokens),
      sleep_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      clock_(SystemNow) {
  if (!transport_) throw InvalidArgument("gateway requires a transport");
  if (!taxonomy_) throw InvalidArgument("gateway requires a taxonomy");
  if (concurrency < 1) throw InvalidArgument("gateway concurrency must be at least 1");
}

void Gateway::Record(UsageLedgerEntry entry) {
  std::lock_guard lock(ledger_mu_);
  if (sink_) sink_(entry);
  ledger_.push_back(std::move(entry));
}

std::vector<LlmResponse> Gateway::Complete(const PromptSpec& spec, const ModelProfile& model,
                                           const CallPolicy& policy) {
  if (policy.repetitions < 1) throw InvalidArgument("repetitions must be positive");
  if (policy.temperature < 0) throw InvalidArgument("temperature must be non-negative");
  if (policy.max_retries < 0) throw InvalidArgument("max_retries must be non-negative");

  const std::int64_t estimate = token_counter_(spec.system_text) + token_counter_(spec.user_text);
  if (estimate > model.max_context) {
    throw Error(ErrorCode::kContextOverflow,
                "prompt " + PromptId(spec) + " needs ~" + std::to_string(estimate) +
                    " tokens; " + model.name + " allows " + std::to_string(model.max_context));
  }

  std::vector<LlmResponse> responses;
  std::string last_error;
  for (int rep = 0; rep < policy.repetitions; ++rep) {
    ChatRequest request{model.name, policy.temperature, spec.system_text, spec.user_text,
                        &spec, rep};
    UsageLedgerEntry entry;
    entry.prompt_id = PromptId(spec);
    entry.model = model.name;
    entry.attempts = 0;
    std::optional<ChatReply> reply;
    for (int attempt = 0; attempt <= policy.max_retries && !reply; ++attempt) {
      if (attempt > 0 && !policy.backoff.empty()) {
        const std::size_t i = std::min<std::size_t>(attempt - 1, policy.backoff.size() - 1);
        sleep_(policy.backoff[i]);
      }
      ++entry.attempts;
      slots_.acquire();
      try {
        reply = transport_->Send(request);
      } catch (const Error& e) {
        slots_.release();
        if (e.code() == ErrorCode::kAuth) {
          entry.outcome = CallOutcome::kFailed;
          entry.error = e.what();
          entry.timestamp = clock_();
          Record(entry);
          throw;
        }
        entry.error = e.what();
        continue;
      } catch (const std::exception& e) {
        slots_.release();
        entry.error = e.what();
        continue;
      }
      slots_.release();
    }
    entry.timestamp = clock_();
    if (!reply) {
      entry.outcome = CallOutcome::kFailed;
      last_error = entry.error;
      Record(std::move(entry));
      continue;
    }
    entry.outcome = entry.attempts == 1 ? CallOutcome::kOk : CallOutcome::kRetriedOk;
    entry.input_tokens = reply->input_tokens > 0 ? reply->input_tokens : estimate;
    entry.output_tokens =
        reply->output_tokens > 0 ? reply->output_tokens : token_counter_(reply->content);
    entry.cost = model.Cost(entry.input_tokens, entry.output_tokens);
    Record(std::move(entry));
    responses.push_back(ParseResponse(*taxonomy_, spec, reply->content, policy.parse));
  }
  if (responses.empty()) {
    throw TransportError("all " + std::to_string(policy.repetitions) + " repetitions of " +
                         PromptId(spec) + " failed: " + last_error);
  }
  return responses;
}

std::vector<UsageLedgerEntry> Gateway::Ledger() const {
  std::lock_guard lock(ledger_mu_);
  return ledger_;
}

Money Gateway::TotalCost() const { return LedgerTotal(Ledger()); }

Money LedgerTotal(const std::vector<UsageLedgerEntry>& ledger) {
  Money total;
  for (const UsageLedgerEntry& e : ledger) total += e.cost;
  return total;
}

}  // namespace rhetann
