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

#include "rhetann/config.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

const ModelProfile& Config::Model(const std::string& name) const {
  for (const ModelProfile& m : models) {
    if (m.name == name) return m;
  }
  throw NotFound("model '" + name + "' is not configured");
}

Config ParseConfig(const std::string& text) {
  Config c;
  try {
    const Json j = Json::parse(text);
    c.endpoint = j.value("endpoint", c.endpoint);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.concurrency = j.value("concurrency", c.concurrency);
    std::set<std::string> names;
    for (const Json& m : j.value("models", Json::array())) {
      ModelProfile p;
      p.name = m.at("name").get<std::string>();
      const double in = m.value("price_in", 0.0);
      const double out = m.value("price_out", 0.0);
      if (in < 0 || out < 0) throw DataError("model '" + p.name + "': negative price");
      p.price_in = TokenPrice::FromDollarsPer1K(in);
      p.price_out = TokenPrice::FromDollarsPer1K(out);
      p.max_context = m.value("max_context", p.max_context);
      const auto kind = ParseModelKind(m.value("kind", "base"));
      if (!kind) throw DataError("model '" + p.name + "': kind must be base or fine_tuned");
      p.kind = *kind;
      if (!names.insert(p.name).second) throw DataError("duplicate model '" + p.name + "'");
      c.models.push_back(std::move(p));
    }
    if (j.contains("human")) {
      c.human_price_per_sentence =
          Money::FromDollars(j["human"].value("price_per_sentence", 1.50));
    }
    if (j.contains("mock")) {
      const Json& m = j["mock"];
      c.mock.mode = m.value("mode", c.mock.mode);
      c.mock.seed = m.value("seed", c.mock.seed);
      c.mock.noisy = m.value("noisy", c.mock.noisy);
      c.mock.canned = m.value("canned", c.mock.canned);
    }
    if (j.contains("server")) {
      const Json& s = j["server"];
      c.server.host = s.value("host", c.server.host);
      c.server.port = s.value("port", c.server.port);
      c.server.assistant_capture = s.value("assistant_capture", c.server.assistant_capture);
      c.server.assistant_model = s.value("assistant_model", c.server.assistant_model);
      c.server.assistant_temperature =
          s.value("assistant_temperature", c.server.assistant_temperature);
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("config: ") + e.what());
  }
  if (c.concurrency < 1) throw DataError("config: concurrency must be at least 1");
  return c;
}

Config LoadConfigFile(const std::string& path) { return ParseConfig(ReadFile(path)); }

std::shared_ptr<ChatTransport> MakeTransport(const Config& config,
                                             std::shared_ptr<const Taxonomy> taxonomy) {
  if (config.is_mock()) {
    if (config.mock.mode == "canned") return MakeCannedTransport(config.mock.canned);
    if (config.mock.mode == "hashing") {
      return MakeHashingTransport(std::move(taxonomy), config.mock.seed, config.mock.noisy);
    }
    throw DataError("config: unknown mock mode '" + config.mock.mode + "'");
  }
  const char* key = std::getenv(config.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("environment variable " + config.api_key_env + " is not set");
  }
  return std::make_shared<HttpChatTransport>(config.endpoint, key);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
  if (!out) throw DataError("cannot write '" + path + "'");
}

}  // namespace rhetann
