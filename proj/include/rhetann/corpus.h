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

#ifndef RHETANN_CORPUS_H_
#define RHETANN_CORPUS_H_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rhetann/parse_tree.h"

namespace rhetann {

enum class Split { kTrain, kSample, kHeldout };

const char* SplitName(Split split);
std::optional<Split> ParseSplit(std::string_view name);

struct Sentence {
  std::string id;
  std::string text;
  std::set<std::string> techniques;
  Split split = Split::kTrain;
  ParseTree tree;
};

struct CorpusDiagnostic {
  enum class Severity { kWarning, kError };
  std::size_t line = 0;  // 1-based
  Severity severity = Severity::kError;
  std::string sentence_id;
  std::string message;
};

// Sentences in file order. Immutable after load.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Sentence> sentences);

  const std::vector<Sentence>& sentences() const { return sentences_; }
  std::size_t size() const { return sentences_.size(); }

  const Sentence* Find(std::string_view id) const;
  const Sentence& Get(std::string_view id) const;  // throws NotFound
  // Position in file order, or nullopt.
  std::optional<std::size_t> IndexOf(std::string_view id) const;

 private:
  std::vector<Sentence> sentences_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CorpusLoadResult {
  Corpus corpus;
  std::vector<CorpusDiagnostic> diagnostics;

  bool ok() const;  // no error-severity diagnostics
};

// Reads newline-delimited JSON records:
//   {"id", "text", "techniques": [...], "parse": "(S ...)", "split"}
// Fragment-level inputs ("fragments": [{"start","end","technique"}]) are
// accepted and rolled up to the sentence's technique set; spans are dropped.
// Lines that fail to parse are reported and skipped. A leaf/text mismatch is a
// warning: the tree's leaves are the tokenization of record.
CorpusLoadResult ParseCorpus(std::string_view text);
CorpusLoadResult LoadCorpusFile(const std::string& path);

// Compares leaf tokens against the display text ignoring whitespace.
bool LeavesMatchText(const ParseTree& tree, std::string_view text);

std::string SerializeCorpusRecord(const Sentence& sentence);

}  // namespace rhetann

#endif  // RHETANN_CORPUS_H_
