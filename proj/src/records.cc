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

#include "rhetann/records.h"

#include <cstdio>
#include <cstdlib>
#include <ctime>

#include "rhetann/error.h"

namespace rhetann {

Timestamp SystemNow() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  const auto ms = t.time_since_epoch().count();
  std::int64_t secs = ms / 1000;
  std::int64_t frac = ms % 1000;
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  const std::time_t tt = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(frac));
  return buf;
}

Timestamp ParseTimestamp(std::string_view text) {
  int year, mon, day, hour, min, sec, msec = 0;
  const std::string s(text);
  const int n = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3dZ", &year,
                            &mon, &day, &hour, &min, &sec, &msec);
  if (n < 6 || s.empty() || s.back() != 'Z') {
    throw DataError("malformed timestamp '" + s + "'");
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = mon - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = min;
  tm.tm_sec = sec;
  const std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(static_cast<std::int64_t>(secs) * 1000 + msec));
}

const char* AnnotatorKindName(AnnotatorKind kind) {
  return kind == AnnotatorKind::kHuman ? "human" : "llm";
}

std::optional<AnnotatorKind> ParseAnnotatorKind(std::string_view name) {
  if (name == "human") return AnnotatorKind::kHuman;
  if (name == "llm") return AnnotatorKind::kLlm;
  return std::nullopt;
}

std::string FormatTemperature(double temperature) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, temperature);
    if (std::strtod(buf, nullptr) == temperature) break;
  }
  std::string out = buf;
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

AnnotatorId LlmAnnotator(std::string_view model, PromptVersion version,
                         double temperature) {
  return AnnotatorId{"llm:" + std::string(model) + ":" +
                         PromptVersionName(version) + ":" +
                         FormatTemperature(temperature),
                     AnnotatorKind::kLlm};
}

const char* ErrorCategoryName(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfounding:
      return "confounding";
    case ErrorCategory::kOverGeneralizing:
      return "over_generalizing";
    case ErrorCategory::kHallucinating:
      return "hallucinating";
    case ErrorCategory::kGreedyAnswering:
      return "greedy_answering";
    case ErrorCategory::kOther:
      return "other";
  }
  return "other";
}

ErrorCategory ParseErrorCategory(std::string_view name) {
  for (ErrorCategory c : kAllErrorCategories) {
    if (name == ErrorCategoryName(c)) return c;
  }
  throw DataError("unknown error category '" + std::string(name) +
                  "' (expected confounding, over_generalizing, hallucinating, "
                  "greedy_answering or other)");
}

const char* CallOutcomeName(CallOutcome o) {
  switch (o) {
    case CallOutcome::kOk:
      return "ok";
    case CallOutcome::kRetriedOk:
      return "retried_ok";
    case CallOutcome::kFailed:
      return "failed";
  }
  return "failed";
}

std::optional<CallOutcome> ParseCallOutcome(std::string_view name) {
  if (name == "ok") return CallOutcome::kOk;
  if (name == "retried_ok") return CallOutcome::kRetriedOk;
  if (name == "failed") return CallOutcome::kFailed;
  return std::nullopt;
}

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kData:
      return "data";
    case ErrorCode::kTransport:
      return "transport";
    case ErrorCode::kAuth:
      return "auth";
    case ErrorCode::kContextOverflow:
      return "context_overflow";
  }
  return "unknown";
}

}  // namespace rhetann
