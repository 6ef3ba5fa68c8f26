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

#ifndef RHETANN_JSON_CODEC_H_
#define RHETANN_JSON_CODEC_H_

// JSON mappings for the persisted and wire-level domain types. Field names
// match the struct members one-to-one.

#include "json.hpp"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

using Json = nlohmann::json;

Json ToJson(const AnnotatorId& a);
Json ToJson(const NodePath& p);
Json ToJson(const PromptSpec& s);
Json ToJson(const LlmResponse& r);
Json ToJson(const AnnotationRecord& r);
Json ToJson(const AssistantExchange& e);
Json ToJson(const GroundTruthLabel& g);
Json ToJson(const ErrorTag& t);
Json ToJson(const UsageLedgerEntry& u);
Json ToJson(const SessionState& s);
Json ToJson(const Feature& f);
Json ToJson(const Taxonomy& t);
Json TreeToJson(const TreeNode& node);

// Decoders throw DataError naming the offending field.
AnnotatorId AnnotatorIdFromJson(const Json& j);
NodePath NodePathFromJson(const Json& j);
PromptSpec PromptSpecFromJson(const Json& j);
LlmResponse LlmResponseFromJson(const Json& j);
AnnotationRecord AnnotationRecordFromJson(const Json& j);
AssistantExchange AssistantExchangeFromJson(const Json& j);
GroundTruthLabel GroundTruthLabelFromJson(const Json& j);
ErrorTag ErrorTagFromJson(const Json& j);
UsageLedgerEntry UsageLedgerEntryFromJson(const Json& j);
SessionState SessionStateFromJson(const Json& j);

}  // namespace rhetann

#endif  // RHETANN_JSON_CODEC_H_
