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

#ifndef RHETANN_RECORDS_H_
#define RHETANN_RECORDS_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rhetann/money.h"
#include "rhetann/parse_tree.h"
#include "rhetann/prompt.h"

namespace rhetann {

// Millisecond-resolution UTC instant.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp SystemNow();
std::string FormatTimestamp(Timestamp t);  // 2026-10-14T09:00:00.000Z
Timestamp ParseTimestamp(std::string_view text);  // throws DataError

enum class AnnotatorKind { kHuman, kLlm };

const char* AnnotatorKindName(AnnotatorKind kind);
std::optional<AnnotatorKind> ParseAnnotatorKind(std::string_view name);

struct AnnotatorId {
  std::string id;
  AnnotatorKind kind = AnnotatorKind::kHuman;

  bool operator==(const AnnotatorId&) const = default;
};

// "llm:<model>:<version>:<temperature>", e.g. "llm:gpt-4:v1:0.2".
AnnotatorId LlmAnnotator(std::string_view model, PromptVersion version,
                         double temperature);
// Shortest decimal with at least one fractional digit: 0 -> "0.0".
std::string FormatTemperature(double temperature);

struct AnnotationRecord {
  std::uint64_t revision = 0;  // assigned by the store
  std::string sentence_id;
  AnnotatorId annotator;
  std::string feature_id;
  PropertySet properties;  // empty means "none apply"
  std::optional<NodePath> node_path;
  Timestamp timestamp{};
  std::string session_id;

  bool operator==(const AnnotationRecord&) const = default;
};

struct AssistantExchange {
  std::string id;  // assigned by the store
  std::string sentence_id;
  std::string feature_id;
  PromptVersion prompt_version = PromptVersion::kV1;
  PromptSpec request;
  std::vector<LlmResponse> responses;  // one per repetition, verbatim
  std::string model;
  double temperature = 0.0;
  Timestamp timestamp{};

  const std::optional<std::string>& property_id() const { return request.property_id; }
  bool operator==(const AssistantExchange&) const = default;
};

struct GroundTruthLabel {
  std::string sentence_id;
  std::string feature_id;
  PropertySet properties;
  std::string author;
  std::string notes;
  Timestamp timestamp{};

  bool operator==(const GroundTruthLabel&) const = default;
};

enum class ErrorCategory {
  kConfounding,
  kOverGeneralizing,
  kHallucinating,
  kGreedyAnswering,
  kOther,
};

inline constexpr ErrorCategory kAllErrorCategories[] = {
    ErrorCategory::kConfounding, ErrorCategory::kOverGeneralizing,
    ErrorCategory::kHallucinating, ErrorCategory::kGreedyAnswering,
    ErrorCategory::kOther};

const char* ErrorCategoryName(ErrorCategory c);
// Closed enum: anything but the five names throws DataError.
ErrorCategory ParseErrorCategory(std::string_view name);

struct ErrorTag {
  std::string exchange_id;
  ErrorCategory category = ErrorCategory::kOther;
  std::string rationale;
  std::string tagger;
  Timestamp timestamp{};

  bool operator==(const ErrorTag&) const = default;
};

enum class CallOutcome { kOk, kRetriedOk, kFailed };

const char* CallOutcomeName(CallOutcome o);
std::optional<CallOutcome> ParseCallOutcome(std::string_view name);

struct UsageLedgerEntry {
  std::string prompt_id;
  std::string model;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  Money cost;
  Timestamp timestamp{};
  CallOutcome outcome = CallOutcome::kOk;
  int attempts = 1;
  std::string error;  // last transport error, if any

  bool operator==(const UsageLedgerEntry&) const = default;
};

struct SessionCursor {
  std::size_t sentence_index = 0;
  std::size_t feature_index = 0;

  bool operator==(const SessionCursor&) const = default;
};

struct SessionState {
  std::string session_id;
  AnnotatorId annotator;
  SessionCursor cursor;
  Timestamp started_at{};

  bool operator==(const SessionState&) const = default;
};

}  // namespace rhetann

#endif  // RHETANN_RECORDS_H_
