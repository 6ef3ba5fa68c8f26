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

#include "rhetann/json_codec.h"

#include "rhetann/error.h"

namespace rhetann {

namespace {

const Json& At(const Json& j, const char* key) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T Get(const Json& j, const char* key) {
  try {
    return At(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T GetOr(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("field '") + key + "': " + e.what());
  }
}

PropertySet SetField(const Json& j, const char* key) {
  const Json& arr = At(j, key);
  if (!arr.is_array()) throw DataError(std::string("field '") + key + "' must be a list");
  PropertySet out;
  for (const Json& v : arr) {
    if (!v.is_string()) throw DataError(std::string("field '") + key + "' must hold strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

Json SetToJson(const PropertySet& s) {
  Json arr = Json::array();
  for (const std::string& v : s) arr.push_back(v);
  return arr;
}

PromptVersion VersionField(const Json& j, const char* key) {
  const std::string name = Get<std::string>(j, key);
  auto v = ParsePromptVersion(name);
  if (!v) throw DataError("unknown prompt version '" + name + "'");
  return *v;
}

}  // namespace

Json ToJson(const AnnotatorId& a) {
  return Json{{"id", a.id}, {"kind", AnnotatorKindName(a.kind)}};
}

AnnotatorId AnnotatorIdFromJson(const Json& j) {
  AnnotatorId a;
  a.id = Get<std::string>(j, "id");
  const std::string kind = Get<std::string>(j, "kind");
  auto k = ParseAnnotatorKind(kind);
  if (!k) throw DataError("unknown annotator kind '" + kind + "'");
  a.kind = *k;
  return a;
}

Json ToJson(const NodePath& p) { return Json(p.indices); }

NodePath NodePathFromJson(const Json& j) {
  if (!j.is_array()) throw DataError("node_path must be a list of indices");
  NodePath p;
  for (const Json& v : j) {
    if (!v.is_number_unsigned()) throw DataError("node_path indices must be non-negative integers");
    p.indices.push_back(v.get<std::size_t>());
  }
  return p;
}

Json ToJson(const PromptSpec& s) {
  return Json{{"version", PromptVersionName(s.version)},
              {"feature_id", s.feature_id},
              {"property_id", s.property_id ? Json(*s.property_id) : Json(nullptr)},
              {"sentence_id", s.sentence_id},
              {"system_text", s.system_text},
              {"user_text", s.user_text},
              {"expected_schema", s.expected_schema == ResponseSchema::kPropertiesExplanation
                                      ? "PropertiesExplanation"
                                      : "AnswerExplanation"}};
}

PromptSpec PromptSpecFromJson(const Json& j) {
  PromptSpec s;
  s.version = VersionField(j, "version");
  s.feature_id = Get<std::string>(j, "feature_id");
  if (auto it = j.find("property_id"); it != j.end() && !it->is_null()) {
    s.property_id = it->get<std::string>();
  }
  s.sentence_id = Get<std::string>(j, "sentence_id");
  s.system_text = Get<std::string>(j, "system_text");
  s.user_text = Get<std::string>(j, "user_text");
  const std::string schema = Get<std::string>(j, "expected_schema");
  if (schema == "PropertiesExplanation") {
    s.expected_schema = ResponseSchema::kPropertiesExplanation;
  } else if (schema == "AnswerExplanation") {
    s.expected_schema = ResponseSchema::kAnswerExplanation;
  } else {
    throw DataError("unknown expected_schema '" + schema + "'");
  }
  return s;
}

Json ToJson(const LlmResponse& r) {
  Json violations = Json::array();
  for (Violation v : r.violations) violations.push_back(ViolationName(v));
  Json parsed = nullptr;
  if (r.parsed) {
    parsed = Json{{"properties", SetToJson(r.parsed->properties)},
                  {"answer", r.parsed->answer ? Json(*r.parsed->answer ? "yes" : "no")
                                              : Json(nullptr)},
                  {"explanation", r.parsed->explanation}};
  }
  return Json{{"raw", r.raw},
              {"parse_ok", r.parse_ok()},
              {"parsed", parsed},
              {"violations", violations}};
}

LlmResponse LlmResponseFromJson(const Json& j) {
  LlmResponse r;
  r.raw = Get<std::string>(j, "raw");
  for (const Json& v : At(j, "violations")) {
    auto parsed = ParseViolation(v.get<std::string>());
    if (!parsed) throw DataError("unknown violation '" + v.get<std::string>() + "'");
    r.violations.push_back(*parsed);
  }
  const Json& p = At(j, "parsed");
  if (!p.is_null()) {
    ParsedResponse pr;
    pr.properties = SetField(p, "properties");
    const Json& ans = At(p, "answer");
    if (!ans.is_null()) pr.answer = ans.get<std::string>() == "yes";
    pr.explanation = Get<std::string>(p, "explanation");
    r.parsed = std::move(pr);
  }
  if (Get<bool>(j, "parse_ok") != r.parse_ok()) {
    throw DataError("parse_ok disagrees with parsed");
  }
  return r;
}

Json ToJson(const AnnotationRecord& r) {
  return Json{{"revision", r.revision},
              {"sentence_id", r.sentence_id},
              {"annotator", ToJson(r.annotator)},
              {"feature_id", r.feature_id},
              {"properties", SetToJson(r.properties)},
              {"node_path", r.node_path ? ToJson(*r.node_path) : Json(nullptr)},
              {"timestamp", FormatTimestamp(r.timestamp)},
              {"session_id", r.session_id}};
}

AnnotationRecord AnnotationRecordFromJson(const Json& j) {
  AnnotationRecord r;
  r.revision = GetOr<std::uint64_t>(j, "revision", 0);
  r.sentence_id = Get<std::string>(j, "sentence_id");
  r.annotator = AnnotatorIdFromJson(At(j, "annotator"));
  r.feature_id = Get<std::string>(j, "feature_id");
  r.properties = SetField(j, "properties");
  if (auto it = j.find("node_path"); it != j.end() && !it->is_null()) {
    r.node_path = NodePathFromJson(*it);
  }
  r.timestamp = ParseTimestamp(Get<std::string>(j, "timestamp"));
  r.session_id = GetOr<std::string>(j, "session_id", "");
  return r;
}

Json ToJson(const AssistantExchange& e) {
  Json responses = Json::array();
  for (const LlmResponse& r : e.responses) responses.push_back(ToJson(r));
  return Json{{"id", e.id},
              {"sentence_id", e.sentence_id},
              {"feature_id", e.feature_id},
              {"prompt_version", PromptVersionName(e.prompt_version)},
              {"request", ToJson(e.request)},
              {"responses", responses},
              {"model", e.model},
              {"temperature", e.temperature},
              {"timestamp", FormatTimestamp(e.timestamp)}};
}

AssistantExchange AssistantExchangeFromJson(const Json& j) {
  AssistantExchange e;
  e.id = GetOr<std::string>(j, "id", "");
  e.sentence_id = Get<std::string>(j, "sentence_id");
  e.feature_id = Get<std::string>(j, "feature_id");
  e.prompt_version = VersionField(j, "prompt_version");
  e.request = PromptSpecFromJson(At(j, "request"));
  for (const Json& r : At(j, "responses")) e.responses.push_back(LlmResponseFromJson(r));
  e.model = Get<std::string>(j, "model");
  e.temperature = Get<double>(j, "temperature");
  e.timestamp = ParseTimestamp(Get<std::string>(j, "timestamp"));
  return e;
}

Json ToJson(const GroundTruthLabel& g) {
  return Json{{"sentence_id", g.sentence_id},
              {"feature_id", g.feature_id},
              {"properties", SetToJson(g.properties)},
              {"author", g.author},
              {"notes", g.notes},
              {"timestamp", FormatTimestamp(g.timestamp)}};
}

GroundTruthLabel GroundTruthLabelFromJson(const Json& j) {
  GroundTruthLabel g;
  g.sentence_id = Get<std::string>(j, "sentence_id");
  g.feature_id = Get<std::string>(j, "feature_id");
  g.properties = SetField(j, "properties");
  g.author = GetOr<std::string>(j, "author", "");
  g.notes = GetOr<std::string>(j, "notes", "");
  g.timestamp = ParseTimestamp(Get<std::string>(j, "timestamp"));
  return g;
}

Json ToJson(const ErrorTag& t) {
  return Json{{"exchange_id", t.exchange_id},
              {"category", ErrorCategoryName(t.category)},
              {"rationale", t.rationale},
              {"tagger", t.tagger},
              {"timestamp", FormatTimestamp(t.timestamp)}};
}

ErrorTag ErrorTagFromJson(const Json& j) {
  ErrorTag t;
  t.exchange_id = Get<std::string>(j, "exchange_id");
  t.category = ParseErrorCategory(Get<std::string>(j, "category"));
  t.rationale = GetOr<std::string>(j, "rationale", "");
  t.tagger = GetOr<std::string>(j, "tagger", "");
  t.timestamp = ParseTimestamp(Get<std::string>(j, "timestamp"));
  return t;
}

Json ToJson(const UsageLedgerEntry& u) {
  return Json{{"prompt_id", u.prompt_id},
              {"model", u.model},
              {"input_tokens", u.input_tokens},
              {"output_tokens", u.output_tokens},
              {"cost_nanos", u.cost.nanos()},
              {"timestamp", FormatTimestamp(u.timestamp)},
              {"outcome", CallOutcomeName(u.outcome)},
              {"attempts", u.attempts},
              {"error", u.error}};
}

UsageLedgerEntry UsageLedgerEntryFromJson(const Json& j) {
  UsageLedgerEntry u;
  u.prompt_id = Get<std::string>(j, "prompt_id");
  u.model = Get<std::string>(j, "model");
  u.input_tokens = Get<std::int64_t>(j, "input_tokens");
  u.output_tokens = Get<std::int64_t>(j, "output_tokens");
  u.cost = Money::FromNanos(Get<std::int64_t>(j, "cost_nanos"));
  u.timestamp = ParseTimestamp(Get<std::string>(j, "timestamp"));
  const std::string outcome = Get<std::string>(j, "outcome");
  auto o = ParseCallOutcome(outcome);
  if (!o) throw DataError("unknown outcome '" + outcome + "'");
  u.outcome = *o;
  u.attempts = GetOr<int>(j, "attempts", 1);
  u.error = GetOr<std::string>(j, "error", "");
  return u;
}

Json ToJson(const SessionState& s) {
  return Json{{"session_id", s.session_id},
              {"annotator", ToJson(s.annotator)},
              {"cursor",
               Json{{"sentence_index", s.cursor.sentence_index},
                    {"feature_index", s.cursor.feature_index}}},
              {"started_at", FormatTimestamp(s.started_at)}};
}

SessionState SessionStateFromJson(const Json& j) {
  SessionState s;
  s.session_id = Get<std::string>(j, "session_id");
  s.annotator = AnnotatorIdFromJson(At(j, "annotator"));
  const Json& c = At(j, "cursor");
  s.cursor.sentence_index = Get<std::size_t>(c, "sentence_index");
  s.cursor.feature_index = Get<std::size_t>(c, "feature_index");
  s.started_at = ParseTimestamp(Get<std::string>(j, "started_at"));
  return s;
}

Json ToJson(const Feature& f) {
  Json props = Json::array();
  for (const Property& p : f.properties) {
    props.push_back(Json{{"id", p.id},
                         {"name", p.name},
                         {"definition", p.definition},
                         {"examples", p.examples}});
  }
  return Json{{"id", f.id},
              {"name", f.name},
              {"part", PartName(f.part)},
              {"annotation_mode", AnnotationModeName(f.annotation_mode)},
              {"fragment_selectable", f.fragment_selectable},
              {"properties", props}};
}

Json ToJson(const Taxonomy& t) {
  Json features = Json::array();
  for (const Feature& f : t.features()) features.push_back(ToJson(f));
  return Json{{"version", t.version()}, {"features", features}};
}

Json TreeToJson(const TreeNode& node) {
  Json j{{"label", node.label}};
  if (node.is_leaf()) {
    j["token"] = *node.token;
  } else {
    Json children = Json::array();
    for (const TreeNode& c : node.children) children.push_back(TreeToJson(c));
    j["children"] = children;
  }
  return j;
}

}  // namespace rhetann
