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

#ifndef RHETANN_TESTS_TESTING_FIXTURES_H_
#define RHETANN_TESTS_TESTING_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/corpus.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann::testing {

std::shared_ptr<const Taxonomy> SharedTaxonomy();

// n sentences "s0001".. with small bracketed trees whose leaves match the
// text. Deterministic in `seed`.
std::string SyntheticCorpusJsonl(std::size_t n, std::uint64_t seed = 1);
std::shared_ptr<const Corpus> SyntheticCorpus(std::size_t n, std::uint64_t seed = 1);

// Fixed instant plus `ms` milliseconds.
Timestamp At(std::int64_t ms);

// Clock that advances one millisecond per call.
Clock SteppingClock(std::int64_t start_ms = 0);

AnnotationRecord Record(std::string sentence_id, std::string annotator, std::string feature_id,
                        PropertySet properties, std::int64_t ms = 0);

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// Per-annotator label choice for scripted annotation runs.
using LabelFn = std::function<PropertySet(const std::string& annotator, const Sentence& sentence,
                                          const Feature& feature)>;

// Correlated random labels: each property has a per-sentence "true" value and
// each annotator flips it with probability `noise`.
LabelFn NoisyLabeler(std::uint64_t seed, double p_true, double noise);

// Submits one record per (sentence, annotator, feature).
void Annotate(AnnotationStore& store, const Corpus& corpus,
              const std::vector<std::string>& annotators, const std::vector<std::string>& features,
              const LabelFn& label, std::int64_t start_ms = 0);

}  // namespace rhetann::testing

#endif  // RHETANN_TESTS_TESTING_FIXTURES_H_
