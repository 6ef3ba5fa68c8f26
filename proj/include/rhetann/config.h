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

#ifndef RHETANN_CONFIG_H_
#define RHETANN_CONFIG_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rhetann/gateway.h"
#include "rhetann/money.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

struct MockSettings {
  std::string mode = "hashing";  // hashing | canned
  std::uint64_t seed = 0;
  bool noisy = false;
  std::string canned;
};

struct ServerSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  bool assistant_capture = false;
  std::string assistant_model;  // defaults to the first configured model
  double assistant_temperature = 0.0;
};

// Gateway and server configuration (JSON). Prices are dollars per 1K tokens.
//
//   {"endpoint": "https://.../v1/chat/completions" | "mock:",
//    "api_key_env": "OPENAI_API_KEY", "concurrency": 8,
//    "models": [{"name": "gpt-4", "price_in": 0.03, "price_out": 0.06,
//                "max_context": 8192, "kind": "base"}],
//    "human": {"price_per_sentence": 1.50},
//    "mock": {"mode": "hashing", "seed": 7, "noisy": false},
//    "server": {"host": "127.0.0.1", "port": 8080, "assistant_capture": true}}
struct Config {
  std::string endpoint = "mock:";
  std::string api_key_env = "OPENAI_API_KEY";
  int concurrency = 8;
  std::vector<ModelProfile> models;
  Money human_price_per_sentence = Money::FromDollars(1.50);
  MockSettings mock;
  ServerSettings server;

  bool is_mock() const { return endpoint.rfind("mock:", 0) == 0; }
  // Throws NotFound.
  const ModelProfile& Model(const std::string& name) const;
};

Config ParseConfig(const std::string& text);  // throws DataError
Config LoadConfigFile(const std::string& path);

// Builds the configured transport. Reads the API key from the environment;
// a missing key is an auth error for HTTP endpoints.
std::shared_ptr<ChatTransport> MakeTransport(const Config& config,
                                             std::shared_ptr<const Taxonomy> taxonomy);

std::string ReadFile(const std::string& path);  // throws DataError
void WriteFile(const std::string& path, const std::string& contents);

}  // namespace rhetann

#endif  // RHETANN_CONFIG_H_
