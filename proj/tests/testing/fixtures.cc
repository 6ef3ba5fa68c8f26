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

#include "testing/fixtures.h"

#include <atomic>
#include <cstdio>

#include "json.hpp"

namespace rhetann::testing {

std::shared_ptr<const Taxonomy> SharedTaxonomy() {
  static const auto shared = std::make_shared<const Taxonomy>(ShippedTaxonomy());
  return shared;
}

namespace {

const char* const kDet[] = {"The", "A", "This", "Every"};
const char* const kNoun[] = {"minister", "report", "crowd", "paper", "agency", "senator"};
const char* const kVerb[] = {"denied", "praised", "ignored", "questioned", "welcomed"};
const char* const kAdj[] = {"new", "secret", "official", "bold", "shoddy"};
const char* const kTechnique[] = {"Loaded_Language", "Name_Calling", "Repetition", "Doubt"};

template <std::size_t N>
std::string Pick(std::mt19937_64& rng, const char* const (&table)[N]) {
  return table[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

}  // namespace

std::string SyntheticCorpusJsonl(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string out;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::string d1 = Pick(rng, kDet), n1 = Pick(rng, kNoun), v = Pick(rng, kVerb);
    const std::string d2 = Pick(rng, kDet), a = Pick(rng, kAdj), n2 = Pick(rng, kNoun);
    const std::string parse = "(S (NP (DT " + d1 + ") (NN " + n1 + ")) (VP (VBD " + v +
                              ") (NP (DT " + d2 + ") (JJ " + a + ") (NN " + n2 + "))) (. .))";
    char id[16];
    std::snprintf(id, sizeof(id), "s%04zu", i);
    nlohmann::json j{{"id", id},
                     {"text", d1 + " " + n1 + " " + v + " " + d2 + " " + a + " " + n2 + " ."},
                     {"techniques", {Pick(rng, kTechnique)}},
                     {"parse", parse},
                     {"split", i % 5 == 0 ? "sample" : "train"}};
    out += j.dump() + "\n";
  }
  return out;
}

std::shared_ptr<const Corpus> SyntheticCorpus(std::size_t n, std::uint64_t seed) {
  CorpusLoadResult r = ParseCorpus(SyntheticCorpusJsonl(n, seed));
  return std::make_shared<const Corpus>(std::move(r.corpus));
}

Timestamp At(std::int64_t ms) {
  // 2026-01-01T00:00:00Z
  return Timestamp(std::chrono::milliseconds(1767225600000LL + ms));
}

Clock SteppingClock(std::int64_t start_ms) {
  auto next = std::make_shared<std::atomic<std::int64_t>>(start_ms);
  return [next] { return At(next->fetch_add(1)); };
}

AnnotationRecord Record(std::string sentence_id, std::string annotator, std::string feature_id,
                        PropertySet properties, std::int64_t ms) {
  AnnotationRecord r;
  r.sentence_id = std::move(sentence_id);
  r.annotator = {std::move(annotator), AnnotatorKind::kHuman};
  r.feature_id = std::move(feature_id);
  r.properties = std::move(properties);
  r.timestamp = At(ms);
  return r;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  char name[64];
  std::snprintf(name, sizeof(name), "rhetann-test-%08x-%d", rd(), counter.fetch_add(1));
  path_ = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

LabelFn NoisyLabeler(std::uint64_t seed, double p_true, double noise) {
  return [seed, p_true, noise](const std::string& annotator, const Sentence& sentence,
                               const Feature& feature) {
    PropertySet out;
    const std::hash<std::string> h;
    for (const Property& p : feature.properties) {
      std::mt19937_64 truth(seed ^ h(sentence.id + "/" + feature.id + "/" + p.id));
      const bool value = std::bernoulli_distribution(p_true)(truth);
      std::mt19937_64 own(seed ^ h(annotator + "/" + sentence.id + "/" + feature.id + "/" + p.id));
      const bool flip = std::bernoulli_distribution(noise)(own);
      if (value != flip) out.insert(p.id);
    }
    return out;
  };
}

void Annotate(AnnotationStore& store, const Corpus& corpus,
              const std::vector<std::string>& annotators, const std::vector<std::string>& features,
              const LabelFn& label, std::int64_t start_ms) {
  std::int64_t ms = start_ms;
  for (const Sentence& s : corpus.sentences()) {
    for (const std::string& a : annotators) {
      for (const std::string& f : features) {
        const Feature& feature = store.taxonomy().GetFeature(f);
        store.Submit(Record(s.id, a, f, label(a, s, feature), ms++));
      }
    }
  }
}

}  // namespace rhetann::testing
