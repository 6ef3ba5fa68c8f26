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

#include "rhetann/taxonomy.h"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "rhetann/error.h"

namespace rhetann {

const char* PartName(Part part) {
  return part == Part::kWordChoice ? "WordChoice" : "Sentences";
}

const char* AnnotationModeName(AnnotationMode mode) {
  switch (mode) {
    case AnnotationMode::kManual:
      return "manual";
    case AnnotationMode::kDerived:
      return "derived";
    case AnnotationMode::kDeprecated:
      return "deprecated";
  }
  return "manual";
}

const Property* Feature::FindProperty(std::string_view property_id) const {
  for (const Property& p : properties) {
    if (p.id == property_id) return &p;
  }
  return nullptr;
}

const Property* Feature::FindPropertyByIdOrName(std::string_view key) const {
  if (const Property* p = FindProperty(key)) return p;
  for (const Property& p : properties) {
    if (p.name == key) return &p;
  }
  return nullptr;
}

Taxonomy::Taxonomy(std::string version, std::vector<Feature> features)
    : version_(std::move(version)), features_(std::move(features)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    index_.emplace(features_[i].id, i);
  }
}

const Feature* Taxonomy::FindFeature(std::string_view feature_id) const {
  auto it = index_.find(std::string(feature_id));
  return it == index_.end() ? nullptr : &features_[it->second];
}

const Feature& Taxonomy::GetFeature(std::string_view feature_id) const {
  const Feature* f = FindFeature(feature_id);
  if (f == nullptr) {
    throw NotFound("unknown feature id '" + std::string(feature_id) + "'");
  }
  return *f;
}

const Property& Taxonomy::GetProperty(std::string_view feature_id,
                                      std::string_view property_id) const {
  const Feature& f = GetFeature(feature_id);
  const Property* p = f.FindProperty(property_id);
  if (p == nullptr) {
    throw NotFound("unknown property id '" + std::string(property_id) +
                   "' in feature '" + f.id + "'");
  }
  return *p;
}

std::vector<const Feature*> Taxonomy::ManualFeatures() const {
  std::vector<const Feature*> out;
  for (const Feature& f : features_) {
    if (f.is_manual()) out.push_back(&f);
  }
  return out;
}

std::string Slugify(std::string_view name) {
  std::string out;
  bool pending_hyphen = false;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      if (pending_hyphen && !out.empty()) out.push_back('-');
      pending_hyphen = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c) || c == '/' || c == '-' || c == '_') {
      pending_hyphen = true;
    } else if (c == '&') {
      if (!out.empty()) out += "-and";
      pending_hyphen = true;
    }
  }
  return out;
}

namespace {

std::string Where(const YAML::Node& node, const std::string& feature_id) {
  std::ostringstream os;
  os << "line " << node.Mark().line + 1;
  if (!feature_id.empty()) os << ", feature '" << feature_id << "'";
  return os.str();
}

[[noreturn]] void Fail(const YAML::Node& node, const std::string& feature_id,
                       const std::string& what) {
  throw DataError("taxonomy: " + what + " (" + Where(node, feature_id) + ")");
}

std::string RequiredString(const YAML::Node& parent, const char* key,
                           const std::string& feature_id) {
  const YAML::Node node = parent[key];
  if (!node) Fail(parent, feature_id, std::string("missing field '") + key + "'");
  if (!node.IsScalar()) {
    Fail(node, feature_id, std::string("field '") + key + "' must be a string");
  }
  return node.as<std::string>();
}

void CheckKeys(const YAML::Node& map, const std::set<std::string>& allowed,
               const std::string& feature_id) {
  if (!map.IsMap()) Fail(map, feature_id, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) Fail(kv.first, feature_id, "unknown field '" + key + "'");
  }
}

Property ParseProperty(const YAML::Node& node, const std::string& feature_id) {
  CheckKeys(node, {"id", "name", "definition", "examples"}, feature_id);
  Property p;
  p.id = RequiredString(node, "id", feature_id);
  p.name = RequiredString(node, "name", feature_id);
  p.definition = RequiredString(node, "definition", feature_id);
  if (p.id.empty()) Fail(node, feature_id, "empty property id");
  if (p.definition.empty()) {
    Fail(node, feature_id, "property '" + p.id + "' has an empty definition");
  }
  if (const YAML::Node ex = node["examples"]) {
    if (!ex.IsSequence()) Fail(ex, feature_id, "'examples' must be a list");
    for (const auto& e : ex) {
      if (!e.IsScalar()) Fail(e, feature_id, "example must be a string");
      p.examples.push_back(e.as<std::string>());
    }
  }
  return p;
}

Feature ParseFeature(const YAML::Node& node) {
  CheckKeys(node,
            {"id", "name", "part", "annotation_mode", "fragment_selectable",
             "properties"},
            "");
  Feature f;
  f.id = RequiredString(node, "id", "");
  if (f.id.empty()) Fail(node, "", "empty feature id");
  f.name = RequiredString(node, "name", f.id);

  const std::string part = RequiredString(node, "part", f.id);
  if (part == "WordChoice") {
    f.part = Part::kWordChoice;
  } else if (part == "Sentences") {
    f.part = Part::kSentences;
  } else {
    Fail(node["part"], f.id, "part must be WordChoice or Sentences, got '" + part + "'");
  }

  if (node["annotation_mode"]) {
    const std::string mode = RequiredString(node, "annotation_mode", f.id);
    if (mode == "manual") {
      f.annotation_mode = AnnotationMode::kManual;
    } else if (mode == "derived") {
      f.annotation_mode = AnnotationMode::kDerived;
    } else if (mode == "deprecated") {
      f.annotation_mode = AnnotationMode::kDeprecated;
    } else {
      Fail(node["annotation_mode"], f.id, "unknown annotation_mode '" + mode + "'");
    }
  }

  if (const YAML::Node fs = node["fragment_selectable"]) {
    try {
      f.fragment_selectable = fs.as<bool>();
    } catch (const YAML::Exception&) {
      Fail(fs, f.id, "fragment_selectable must be a boolean");
    }
  }

  const YAML::Node props = node["properties"];
  if (!props || !props.IsSequence()) {
    Fail(node, f.id, "'properties' must be a list");
  }
  std::set<std::string> seen;
  for (const auto& pn : props) {
    Property p = ParseProperty(pn, f.id);
    if (!seen.insert(p.id).second) {
      Fail(pn, f.id, "duplicate property id '" + p.id + "'");
    }
    f.properties.push_back(std::move(p));
  }
  if (f.properties.size() < kMinProperties ||
      f.properties.size() > kMaxProperties) {
    std::ostringstream os;
    os << "property count " << f.properties.size() << " outside ["
       << kMinProperties << ", " << kMaxProperties << "]";
    Fail(props, f.id, os.str());
  }
  return f;
}

}  // namespace

Taxonomy LoadTaxonomy(std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(source));
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << "taxonomy: malformed document at line " << e.mark.line + 1 << ": "
       << e.msg;
    throw DataError(os.str());
  }
  if (!root || !root.IsMap()) {
    throw DataError("taxonomy: document root must be a mapping");
  }
  try {
    CheckKeys(root, {"version", "features"}, "");
    const std::string version = RequiredString(root, "version", "");
    const YAML::Node features = root["features"];
    if (!features || !features.IsSequence()) {
      Fail(root, "", "'features' must be a list");
    }
    std::vector<Feature> out;
    std::set<std::string> seen;
    for (const auto& fn : features) {
      Feature f = ParseFeature(fn);
      if (!seen.insert(f.id).second) {
        Fail(fn, f.id, "duplicate feature id '" + f.id + "'");
      }
      out.push_back(std::move(f));
    }
    return Taxonomy(version, std::move(out));
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << "taxonomy: " << e.msg << " (line " << e.mark.line + 1 << ")";
    throw DataError(os.str());
  }
}

Taxonomy LoadTaxonomyFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("taxonomy: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return LoadTaxonomy(buf.str());
}

const Taxonomy& ShippedTaxonomy() {
  static const Taxonomy taxonomy = LoadTaxonomy(ShippedTaxonomyText());
  return taxonomy;
}

std::string SerializeTaxonomy(const Taxonomy& taxonomy) {
  YAML::Emitter out;
  out.SetStringFormat(YAML::DoubleQuoted);
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << taxonomy.version();
  out << YAML::Key << "features" << YAML::Value << YAML::BeginSeq;
  for (const Feature& f : taxonomy.features()) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << f.id;
    out << YAML::Key << "name" << YAML::Value << f.name;
    out << YAML::Key << "part" << YAML::Value << PartName(f.part);
    out << YAML::Key << "annotation_mode" << YAML::Value
        << AnnotationModeName(f.annotation_mode);
    if (!f.fragment_selectable) {
      out << YAML::Key << "fragment_selectable" << YAML::Value << false;
    }
    out << YAML::Key << "properties" << YAML::Value << YAML::BeginSeq;
    for (const Property& p : f.properties) {
      out << YAML::BeginMap;
      out << YAML::Key << "id" << YAML::Value << p.id;
      out << YAML::Key << "name" << YAML::Value << p.name;
      out << YAML::Key << "definition" << YAML::Value << p.definition;
      out << YAML::Key << "examples" << YAML::Value << YAML::Flow
          << YAML::BeginSeq;
      for (const std::string& e : p.examples) out << e;
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace rhetann
