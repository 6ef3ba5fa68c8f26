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

#include "rhetann/prompt.h"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "rhetann/error.h"

namespace rhetann {

const char* PromptVersionName(PromptVersion v) {
  return v == PromptVersion::kV1 ? "v1" : "v2";
}

std::optional<PromptVersion> ParsePromptVersion(std::string_view name) {
  if (name == "v1" || name == "V1") return PromptVersion::kV1;
  if (name == "v2" || name == "V2") return PromptVersion::kV2;
  return std::nullopt;
}

const char* ViolationName(Violation v) {
  switch (v) {
    case Violation::kUnknownProperty:
      return "unknown_property";
    case Violation::kMissingKey:
      return "missing_key";
    case Violation::kNotJson:
      return "not_json";
    case Violation::kExtraOutput:
      return "extra_output";
    case Violation::kInvalidValue:
      return "invalid_value";
  }
  return "not_json";
}

std::optional<Violation> ParseViolation(std::string_view name) {
  for (Violation v : {Violation::kUnknownProperty, Violation::kMissingKey,
                      Violation::kNotJson, Violation::kExtraOutput,
                      Violation::kInvalidValue}) {
    if (name == ViolationName(v)) return v;
  }
  return std::nullopt;
}

bool LlmResponse::HasViolation(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

namespace {

constexpr std::string_view kDelimiter = "```";

void CheckDelimiterSafe(std::string_view sentence) {
  if (sentence.find(kDelimiter) != std::string_view::npos ||
      (!sentence.empty() && (sentence.front() == '`' || sentence.back() == '`'))) {
    throw InvalidArgument(
        "sentence text collides with the triple-backtick delimiter; replace "
        "backtick runs (e.g. with single quotes) before rendering");
  }
}

std::string RenderExample(std::string_view sentence) {
  std::string out = "Example text: ";
  out += kDelimiter;
  out += sentence;
  out += kDelimiter;
  return out;
}

const Feature& RequireManual(const Taxonomy& taxonomy, std::string_view feature_id) {
  const Feature& f = taxonomy.GetFeature(feature_id);
  if (!f.is_manual()) {
    throw InvalidArgument("feature '" + f.id + "' is " +
                          AnnotationModeName(f.annotation_mode) +
                          " and is not prompted");
  }
  return f;
}

}  // namespace

std::string RenderPropertyLine(const Property& property) {
  std::string line = property.name + ": " + property.definition;
  if (!property.examples.empty()) {
    line += property.examples.size() == 1 ? " Example: " : " Examples: ";
    for (std::size_t i = 0; i < property.examples.size(); ++i) {
      if (i) line += ", ";
      line += "'" + property.examples[i] + "'";
    }
  }
  return line;
}

PromptSpec BuildV1(const Taxonomy& taxonomy, std::string_view feature_id,
                   std::string_view sentence_text, std::string_view sentence_id) {
  const Feature& f = RequireManual(taxonomy, feature_id);
  CheckDelimiterSafe(sentence_text);

  std::string user =
      "Your task is to identify which, if any, of the following properties "
      "of " + f.name +
      " are used in the example text.   You may select multiple properties. "
      "Each line contains a property followed by a colon, followed by a brief "
      "definition and example(s):\n";
  for (const Property& p : f.properties) user += RenderPropertyLine(p) + "\n";
  user +=
      "Format your response as a JSON object with \"Properties\" and "
      "\"Explanation\" as the keys.  The value of \"Properties\" should be a "
      "list. If none of the properties are present, return an empty list.  "
      "Explain your choice in the \"Explanation\". Make your response as short "
      "as possible. The example text is delimited with triple backticks.\n";
  user += RenderExample(sentence_text);

  PromptSpec spec;
  spec.version = PromptVersion::kV1;
  spec.feature_id = f.id;
  spec.sentence_id = std::string(sentence_id);
  spec.system_text = std::string(kSystemPersona);
  spec.user_text = std::move(user);
  spec.expected_schema = ResponseSchema::kPropertiesExplanation;
  return spec;
}

PromptSpec BuildV2(const Taxonomy& taxonomy, std::string_view feature_id,
                   std::string_view property_id, std::string_view sentence_text,
                   std::string_view sentence_id) {
  const Feature& f = RequireManual(taxonomy, feature_id);
  const Property& p = taxonomy.GetProperty(feature_id, property_id);
  CheckDelimiterSafe(sentence_text);

  std::string user =
      "Your task is to identify whether the following property of " + f.name +
      " is used in the example text. The line contains the property followed "
      "by a colon, followed by a brief definition and example(s):\n";
  user += RenderPropertyLine(p) + "\n";
  user +=
      "Format your response as a JSON object with \"Answer\" and "
      "\"Explanation\" as the keys. The value of \"Answer\" should be either "
      "\"yes\" or \"no\". Explain your choice in the \"Explanation\". Make "
      "your response as short as possible. The example text is delimited with "
      "triple backticks.\n";
  user += RenderExample(sentence_text);

  PromptSpec spec;
  spec.version = PromptVersion::kV2;
  spec.feature_id = f.id;
  spec.property_id = p.id;
  spec.sentence_id = std::string(sentence_id);
  spec.system_text = std::string(kSystemPersona);
  spec.user_text = std::move(user);
  spec.expected_schema = ResponseSchema::kAnswerExplanation;
  return spec;
}

std::vector<PromptSpec> BuildV2All(const Taxonomy& taxonomy,
                                   std::string_view feature_id,
                                   std::string_view sentence_text,
                                   std::string_view sentence_id) {
  std::vector<PromptSpec> out;
  for (const Property& p : taxonomy.GetFeature(feature_id).properties) {
    out.push_back(BuildV2(taxonomy, feature_id, p.id, sentence_text, sentence_id));
  }
  return out;
}

namespace {

using nlohmann::json;

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

const Property* MatchProperty(const Feature& f, const std::string& name) {
  if (const Property* p = f.FindPropertyByIdOrName(name)) return p;
  const std::string key = Lower(Trim(name));
  for (const Property& p : f.properties) {
    if (Lower(p.name) == key || p.id == key) return &p;
  }
  return nullptr;
}

void AddViolation(LlmResponse* r, Violation v) {
  if (!r->HasViolation(v)) r->violations.push_back(v);
}

// Parses `text` as a JSON object, falling back to the outermost {...}
// substring when the model wrapped the object in prose or code fences.
std::optional<json> ExtractObject(std::string_view text, LlmResponse* r) {
  const std::string trimmed = Trim(text);
  json j = json::parse(trimmed, nullptr, /*allow_exceptions=*/false);
  if (!j.is_discarded() && j.is_object()) return j;

  const std::size_t open = trimmed.find('{');
  const std::size_t close = trimmed.rfind('}');
  if (open != std::string::npos && close != std::string::npos && close > open) {
    json inner = json::parse(trimmed.substr(open, close - open + 1), nullptr, false);
    if (!inner.is_discarded() && inner.is_object()) {
      AddViolation(r, Violation::kExtraOutput);
      return inner;
    }
  }
  AddViolation(r, Violation::kNotJson);
  return std::nullopt;
}

}  // namespace

LlmResponse ParseResponse(const Taxonomy& taxonomy, const PromptSpec& spec,
                          std::string_view raw, ParseOptions options) {
  LlmResponse r;
  r.raw = std::string(raw);
  const Feature* feature = taxonomy.FindFeature(spec.feature_id);
  std::optional<json> obj = ExtractObject(raw, &r);
  if (!obj) return r;
  if (feature == nullptr) {
    // The prompt names a feature this taxonomy does not know.
    AddViolation(&r, Violation::kInvalidValue);
    return r;
  }

  ParsedResponse parsed;
  bool ok = true;

  auto expl = obj->find("Explanation");
  if (expl == obj->end()) {
    if (options.require_explanation) {
      AddViolation(&r, Violation::kMissingKey);
      ok = false;
    }
  } else if (!expl->is_string()) {
    AddViolation(&r, Violation::kInvalidValue);
    ok = false;
  } else {
    parsed.explanation = expl->get<std::string>();
  }

  if (spec.expected_schema == ResponseSchema::kPropertiesExplanation) {
    auto props = obj->find("Properties");
    if (props == obj->end()) {
      AddViolation(&r, Violation::kMissingKey);
      ok = false;
    } else if (!props->is_array()) {
      AddViolation(&r, Violation::kInvalidValue);
      ok = false;
    } else {
      for (const json& item : *props) {
        const Property* p =
            item.is_string() ? MatchProperty(*feature, item.get<std::string>()) : nullptr;
        if (p == nullptr) {
          AddViolation(&r, Violation::kUnknownProperty);
        } else {
          parsed.properties.insert(p->id);
        }
      }
    }
  } else {
    auto answer = obj->find("Answer");
    if (answer == obj->end()) {
      AddViolation(&r, Violation::kMissingKey);
      ok = false;
    } else {
      const std::string value =
          answer->is_string() ? Lower(Trim(answer->get<std::string>())) : "";
      if (value == "yes" || value == "no") {
        parsed.answer = value == "yes";
        if (*parsed.answer && spec.property_id) {
          parsed.properties.insert(*spec.property_id);
        }
      } else {
        AddViolation(&r, Violation::kInvalidValue);
        ok = false;
      }
    }
  }

  if (ok) r.parsed = std::move(parsed);
  return r;
}

std::string SerializeParsedResponse(const Taxonomy& taxonomy,
                                    const PromptSpec& spec,
                                    const ParsedResponse& parsed,
                                    bool include_explanation) {
  nlohmann::ordered_json j;
  if (spec.expected_schema == ResponseSchema::kPropertiesExplanation) {
    j["Properties"] = nlohmann::ordered_json::array();
    for (const Property& p : taxonomy.GetFeature(spec.feature_id).properties) {
      if (parsed.properties.count(p.id)) j["Properties"].push_back(p.name);
    }
  } else {
    bool yes = parsed.answer.value_or(false);
    j["Answer"] = yes ? "yes" : "no";
  }
  if (include_explanation) j["Explanation"] = parsed.explanation;
  return j.dump();
}

}  // namespace rhetann
