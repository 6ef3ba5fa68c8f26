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

#ifndef RHETANN_TAXONOMY_H_
#define RHETANN_TAXONOMY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rhetann {

enum class Part { kWordChoice, kSentences };

// Whether a feature is annotated at all. Derived and deprecated features
// stay in the taxonomy but pipelines skip them.
enum class AnnotationMode { kManual, kDerived, kDeprecated };

const char* PartName(Part part);
const char* AnnotationModeName(AnnotationMode mode);

struct Property {
  std::string id;
  std::string name;
  std::string definition;
  std::vector<std::string> examples;

  bool operator==(const Property&) const = default;
};

struct Feature {
  std::string id;
  std::string name;
  Part part = Part::kSentences;
  AnnotationMode annotation_mode = AnnotationMode::kManual;
  bool fragment_selectable = true;
  std::vector<Property> properties;

  const Property* FindProperty(std::string_view property_id) const;
  // Resolves a property by id or by exact display name. Model responses
  // quote display names ("perfect progressive"), stored records use ids.
  const Property* FindPropertyByIdOrName(std::string_view key) const;
  bool is_manual() const { return annotation_mode == AnnotationMode::kManual; }

  bool operator==(const Feature&) const = default;
};

inline constexpr std::size_t kMinProperties = 2;
inline constexpr std::size_t kMaxProperties = 14;
inline constexpr std::size_t kShippedFeatureCount = 22;

// Immutable after construction; safe to share across threads.
class Taxonomy {
 public:
  Taxonomy(std::string version, std::vector<Feature> features);

  const std::string& version() const { return version_; }
  const std::vector<Feature>& features() const { return features_; }

  // Returns nullptr when absent; never a prefix or fuzzy match.
  const Feature* FindFeature(std::string_view feature_id) const;

  // Throwing lookups. NotFound names the missing id.
  const Feature& GetFeature(std::string_view feature_id) const;
  const Property& GetProperty(std::string_view feature_id,
                              std::string_view property_id) const;

  std::vector<const Feature*> ManualFeatures() const;

  bool operator==(const Taxonomy& other) const {
    return version_ == other.version_ && features_ == other.features_;
  }

 private:
  std::string version_;
  std::vector<Feature> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses the YAML taxonomy document. Errors are DataError with the feature id
// (when known) and the 1-based line of the offending node.
Taxonomy LoadTaxonomy(std::string_view source);
Taxonomy LoadTaxonomyFile(const std::string& path);

// The taxonomy file compiled into the library.
const Taxonomy& ShippedTaxonomy();
std::string_view ShippedTaxonomyText();

// Emits a document LoadTaxonomy accepts; Load(Serialize(t)) == t.
std::string SerializeTaxonomy(const Taxonomy& taxonomy);

// Lowercase slug: alphanumerics kept, whitespace and '/' become hyphens,
// '&' is spelled "and", other punctuation dropped, hyphen runs collapsed and
// trimmed.
std::string Slugify(std::string_view name);

}  // namespace rhetann

#endif  // RHETANN_TAXONOMY_H_
