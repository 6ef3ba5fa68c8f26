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

#ifndef RHETANN_PROMPT_H_
#define RHETANN_PROMPT_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/taxonomy.h"

namespace rhetann {

using PropertySet = std::set<std::string>;

// V1 asks for every applicable property of a feature at once; V2 asks a
// yes/no question about a single property.
enum class PromptVersion { kV1, kV2 };
enum class ResponseSchema { kPropertiesExplanation, kAnswerExplanation };

const char* PromptVersionName(PromptVersion v);  // "v1" / "v2"
std::optional<PromptVersion> ParsePromptVersion(std::string_view name);

struct PromptSpec {
  PromptVersion version = PromptVersion::kV1;
  std::string feature_id;
  std::optional<std::string> property_id;  // V2 only
  std::string sentence_id;
  std::string system_text;
  std::string user_text;
  ResponseSchema expected_schema = ResponseSchema::kPropertiesExplanation;

  bool operator==(const PromptSpec&) const = default;
};

inline constexpr std::string_view kSystemPersona =
    "You are a rhetorician and linguist specializing in news text.";

// Renders the V1 prompt. Throws NotFound for an unknown feature and
// InvalidArgument for a non-manual feature or a sentence that would break the
// triple-backtick delimiter.
PromptSpec BuildV1(const Taxonomy& taxonomy, std::string_view feature_id,
                   std::string_view sentence_text,
                   std::string_view sentence_id = "");

// Renders the single-property V2 prompt. Throws NotFound if the property is
// not part of the feature.
PromptSpec BuildV2(const Taxonomy& taxonomy, std::string_view feature_id,
                   std::string_view property_id, std::string_view sentence_text,
                   std::string_view sentence_id = "");

// One V2 prompt per property, in taxonomy order.
std::vector<PromptSpec> BuildV2All(const Taxonomy& taxonomy,
                                   std::string_view feature_id,
                                   std::string_view sentence_text,
                                   std::string_view sentence_id = "");

// "name: definition Example: 'x'" as it appears inside a prompt.
std::string RenderPropertyLine(const Property& property);

enum class Violation {
  kUnknownProperty,
  kMissingKey,
  kNotJson,
  kExtraOutput,
  kInvalidValue,
};

const char* ViolationName(Violation v);
std::optional<Violation> ParseViolation(std::string_view name);

struct ParsedResponse {
  // Property ids. For V2 this is {property_id} on "yes" and {} on "no", so
  // consistency accounting treats both prompt versions alike.
  PropertySet properties;
  std::optional<bool> answer;  // V2 only
  std::string explanation;

  bool operator==(const ParsedResponse&) const = default;
};

struct LlmResponse {
  std::string raw;
  std::optional<ParsedResponse> parsed;  // present iff the parse succeeded
  std::vector<Violation> violations;

  bool parse_ok() const { return parsed.has_value(); }
  bool HasViolation(Violation v) const;
  bool operator==(const LlmResponse&) const = default;
};

struct ParseOptions {
  // Fine-tuned answer-only models omit the explanation.
  bool require_explanation = true;
};

// Strict JSON-object parse of a model reply. Never throws; every problem is
// encoded in `violations`.
LlmResponse ParseResponse(const Taxonomy& taxonomy, const PromptSpec& spec,
                          std::string_view raw, ParseOptions options = {});

// Inverse of ParseResponse for a successful parse: the JSON object a model
// would have to emit to produce `parsed`.
std::string SerializeParsedResponse(const Taxonomy& taxonomy,
                                    const PromptSpec& spec,
                                    const ParsedResponse& parsed,
                                    bool include_explanation = true);

}  // namespace rhetann

#endif  // RHETANN_PROMPT_H_
