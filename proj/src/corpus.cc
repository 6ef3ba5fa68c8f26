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

#include "rhetann/corpus.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rhetann {

using nlohmann::json;

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kSample:
      return "sample";
    case Split::kHeldout:
      return "heldout";
  }
  return "train";
}

std::optional<Split> ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "sample") return Split::kSample;
  if (name == "heldout") return Split::kHeldout;
  return std::nullopt;
}

Corpus::Corpus(std::vector<Sentence> sentences)
    : sentences_(std::move(sentences)) {
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    index_.emplace(sentences_[i].id, i);
  }
}

const Sentence* Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &sentences_[it->second];
}

const Sentence& Corpus::Get(std::string_view id) const {
  const Sentence* s = Find(id);
  if (s == nullptr) throw NotFound("unknown sentence id '" + std::string(id) + "'");
  return *s;
}

std::optional<std::size_t> Corpus::IndexOf(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool CorpusLoadResult::ok() const {
  for (const CorpusDiagnostic& d : diagnostics) {
    if (d.severity == CorpusDiagnostic::Severity::kError) return false;
  }
  return true;
}

bool LeavesMatchText(const ParseTree& tree, std::string_view text) {
  std::string joined;
  for (const std::string& t : tree.tokens()) joined += t;
  std::string squeezed;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) squeezed.push_back(c);
  }
  std::string leaves;
  for (char c : joined) {
    if (!std::isspace(static_cast<unsigned char>(c))) leaves.push_back(c);
  }
  return leaves == squeezed;
}

namespace {

using Severity = CorpusDiagnostic::Severity;

bool IsBlank(std::string_view line) {
  for (char c : line) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string StringField(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

CorpusLoadResult ParseCorpus(std::string_view text) {
  CorpusLoadResult result;
  std::vector<Sentence> sentences;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (IsBlank(line)) continue;

    auto report = [&](Severity sev, const std::string& id, const std::string& msg) {
      result.diagnostics.push_back(CorpusDiagnostic{line_no, sev, id, msg});
    };

    Sentence s;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw DataError("record must be a JSON object");
      s.id = StringField(j, "id");
      s.text = StringField(j, "text");
      if (s.id.empty()) throw DataError("empty sentence id");
      if (s.text.empty()) throw DataError("empty sentence text");

      if (auto it = j.find("techniques"); it != j.end()) {
        if (!it->is_array()) throw DataError("'techniques' must be a list");
        for (const json& t : *it) s.techniques.insert(t.get<std::string>());
      }
      if (auto it = j.find("fragments"); it != j.end()) {
        if (!it->is_array()) throw DataError("'fragments' must be a list");
        for (const json& f : *it) {
          s.techniques.insert(f.at("technique").get<std::string>());
        }
      }
      if (auto it = j.find("split"); it != j.end()) {
        const auto split = ParseSplit(it->get<std::string>());
        if (!split) throw DataError("unknown split '" + it->get<std::string>() + "'");
        s.split = *split;
      }
      s.tree = ParseBracketed(StringField(j, "parse"));
      s.tree.set_sentence_id(s.id);
    } catch (const json::exception& e) {
      report(Severity::kError, s.id, std::string("malformed record: ") + e.what());
      continue;
    } catch (const Error& e) {
      report(Severity::kError, s.id, e.what());
      continue;
    }

    if (!seen.insert(s.id).second) {
      report(Severity::kError, s.id, "duplicate sentence id '" + s.id + "'");
      continue;
    }
    if (!LeavesMatchText(s.tree, s.text)) {
      report(Severity::kWarning, s.id, "parse leaves do not match sentence text");
    }
    sentences.push_back(std::move(s));
  }
  result.corpus = Corpus(std::move(sentences));
  return result;
}

CorpusLoadResult LoadCorpusFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("corpus: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseCorpus(buf.str());
}

std::string SerializeCorpusRecord(const Sentence& sentence) {
  json j;
  j["id"] = sentence.id;
  j["text"] = sentence.text;
  j["techniques"] = sentence.techniques;
  j["parse"] = SerializeBracketed(sentence.tree);
  j["split"] = SplitName(sentence.split);
  return j.dump();
}

}  // namespace rhetann
