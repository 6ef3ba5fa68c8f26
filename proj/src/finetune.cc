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

#include "rhetann/finetune.h"

#include <algorithm>
#include <filesystem>
#include <random>

#include "rhetann/config.h"
#include "rhetann/digest.h"
#include "rhetann/error.h"
#include "rhetann/json_codec.h"
#include "rhetann/prompt.h"

namespace rhetann {

using OrderedJson = nlohmann::ordered_json;

const char* DatasetKindName(DatasetKind k) {
  switch (k) {
    case DatasetKind::kSmall:
      return "small";
    case DatasetKind::kMedium:
      return "medium";
    case DatasetKind::kLarge:
      return "large";
  }
  return "large";
}

std::optional<DatasetKind> ParseDatasetKind(std::string_view name) {
  if (name == "small") return DatasetKind::kSmall;
  if (name == "medium") return DatasetKind::kMedium;
  if (name == "large") return DatasetKind::kLarge;
  return std::nullopt;
}

const char* PolarityName(Polarity p) {
  return p == Polarity::kPositive ? "positive" : "negative";
}

const char* ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kGroundTruth:
      return "ground_truth";
    case Provenance::kMajorityVote:
      return "majority_vote";
    case Provenance::kAbsence:
      return "absence";
  }
  return "absence";
}

VoteLabel ClassifyVote(std::size_t k, std::size_t a) {
  if (k == 0) return VoteLabel::kUnlabeled;
  if (a == 0) return VoteLabel::kNegative;
  if (k < 2) return VoteLabel::kSingleAnnotator;
  if (a >= k / 2 + 1) return VoteLabel::kPositive;
  return VoteLabel::kMinority;
}

namespace {

Polarity ParsePolarity(const std::string& s) {
  if (s == "positive") return Polarity::kPositive;
  if (s == "negative") return Polarity::kNegative;
  throw DataError("unknown polarity '" + s + "'");
}

Provenance ParseProvenance(const std::string& s) {
  if (s == "ground_truth") return Provenance::kGroundTruth;
  if (s == "majority_vote") return Provenance::kMajorityVote;
  if (s == "absence") return Provenance::kAbsence;
  throw DataError("unknown provenance '" + s + "'");
}

// Per-property generator so adding a property does not reshuffle the others.
std::mt19937_64 PropertyRng(std::uint64_t seed, std::string_view property_id) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : property_id) h = (h ^ c) * 1099511628211ull;
  return std::mt19937_64(seed ^ h);
}

// Fisher-Yates with a plain modulo draw; std::shuffle's distribution is not
// portable across standard libraries.
template <typename T>
void SeededShuffle(std::vector<T>* v, std::mt19937_64& rng) {
  for (std::size_t i = v->size(); i > 1; --i) {
    std::swap((*v)[i - 1], (*v)[rng() % i]);
  }
}

TrainingExample MakeExample(const Taxonomy& taxonomy, const Sentence& s, const Feature& f,
                            const Property& p, Polarity polarity, Provenance provenance,
                            std::optional<std::string> explanation) {
  const PromptSpec spec = BuildV2(taxonomy, f.id, p.id, s.text, s.id);
  ParsedResponse parsed;
  parsed.answer = polarity == Polarity::kPositive;
  if (parsed.answer.value()) parsed.properties.insert(p.id);
  parsed.explanation = explanation.value_or("");
  TrainingExample ex;
  ex.sentence_id = s.id;
  ex.feature_id = f.id;
  ex.property_id = p.id;
  ex.polarity = polarity;
  ex.provenance = provenance;
  ex.system_text = spec.system_text;
  ex.user_text = spec.user_text;
  ex.assistant_text = SerializeParsedResponse(taxonomy, spec, parsed, explanation.has_value());
  return ex;
}

std::vector<std::string> HumanAnnotators(const StoreView& view, const BuildOptions& options) {
  if (!options.annotators.empty()) return options.annotators;
  std::vector<std::string> out;
  for (const AnnotatorId& a : view.Annotators()) {
    if (a.kind == AnnotatorKind::kHuman) out.push_back(a.id);
  }
  return out;
}

std::set<std::string> Exclusions(const StoreView& view, std::string_view feature_id,
                                 const BuildOptions& options) {
  std::set<std::string> out = options.exclusions;
  for (const GroundTruthLabel& g : view.GroundTruthFor(feature_id)) out.insert(g.sentence_id);
  return out;
}

struct VotePools {
  // Per property id, sentence ids in corpus order.
  std::map<std::string, std::vector<const Sentence*>> positive;
  std::map<std::string, std::vector<const Sentence*>> negative;
  DropStats drops;
  std::size_t candidates = 0;
};

VotePools CollectVotes(const StoreView& view, const Corpus& corpus, const Feature& f,
                       const BuildOptions& options) {
  const std::vector<std::string> annotators = HumanAnnotators(view, options);
  const std::set<std::string> excluded = Exclusions(view, f.id, options);
  const AnnotationMatrix m = view.Matrix(f.id, annotators);
  std::map<std::string, const AnnotationRow*> rows;
  for (const AnnotationRow& r : m.rows) rows.emplace(r.sentence_id, &r);

  VotePools pools;
  for (const Sentence& s : corpus.sentences()) {
    auto row = rows.find(s.id);
    if (row == rows.end()) continue;
    std::size_t k = 0;
    for (const auto& v : row->second->values) k += v.has_value();
    if (k == 0) continue;
    for (const Property& p : f.properties) {
      ++pools.candidates;
      if (excluded.count(s.id)) {
        ++pools.drops.excluded;
        continue;
      }
      std::size_t a = 0;
      for (const auto& v : row->second->values) a += v && v->count(p.id);
      switch (ClassifyVote(k, a)) {
        case VoteLabel::kPositive:
          pools.positive[p.id].push_back(&s);
          break;
        case VoteLabel::kNegative:
          pools.negative[p.id].push_back(&s);
          break;
        case VoteLabel::kMinority:
          ++pools.drops.minority;
          break;
        case VoteLabel::kSingleAnnotator:
          ++pools.drops.single_annotator;
          break;
        case VoteLabel::kUnlabeled:
          break;
      }
    }
  }
  return pools;
}

Dataset NewDataset(DatasetKind kind, const StoreView& view, const Feature& f) {
  Dataset d;
  d.kind = kind;
  d.feature_id = f.id;
  d.source_snapshot = Sha256Digest(view.Export());
  return d;
}

std::string TemplateExplanation(const Property& p, bool positive) {
  return positive ? "The sentence uses " + p.name + "." : "The sentence does not use " + p.name + ".";
}

}  // namespace

Dataset BuildSmall(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                   std::string_view feature_id, const BuildOptions& options) {
  const Feature& f = taxonomy.GetFeature(feature_id);
  Dataset d = NewDataset(DatasetKind::kSmall, view, f);
  std::vector<GroundTruthLabel> truth;
  for (const GroundTruthLabel& g : view.GroundTruthFor(f.id)) {
    if (corpus.Find(g.sentence_id) != nullptr) truth.push_back(g);
  }
  for (const Property& p : f.properties) {
    std::vector<const GroundTruthLabel*> pos, neg;
    for (const GroundTruthLabel& g : truth) (g.properties.count(p.id) ? pos : neg).push_back(&g);
    if (pos.empty() || neg.empty()) {
      throw DataError("insufficient ground truth for property '" + p.id + "' of feature '" +
                      f.id + "': " + std::to_string(pos.size()) + " positive, " +
                      std::to_string(neg.size()) + " negative");
    }
    std::mt19937_64 rng = PropertyRng(options.seed, p.id);
    d.candidate_pairs += pos.size() + neg.size();
    for (auto [pool, polarity] : {std::pair{&pos, Polarity::kPositive},
                                  std::pair{&neg, Polarity::kNegative}}) {
      const GroundTruthLabel* g = (*pool)[rng() % pool->size()];
      const bool positive = polarity == Polarity::kPositive;
      d.examples.push_back(MakeExample(
          taxonomy, corpus.Get(g->sentence_id), f, p, polarity, Provenance::kGroundTruth,
          g->notes.empty() ? TemplateExplanation(p, positive) : g->notes));
    }
  }
  return d;
}

Dataset BuildMedium(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                    std::string_view feature_id, const BuildOptions& options) {
  const Feature& f = taxonomy.GetFeature(feature_id);
  Dataset d = NewDataset(DatasetKind::kMedium, view, f);
  VotePools pools = CollectVotes(view, corpus, f, options);
  d.drops = pools.drops;
  d.candidate_pairs = pools.candidates;
  for (const Property& p : f.properties) {
    auto& pos = pools.positive[p.id];
    auto& neg = pools.negative[p.id];
    if (pos.empty() && neg.empty()) {
      throw DataError("no candidates for property '" + p.id + "' of feature '" + f.id + "'");
    }
    std::mt19937_64 rng = PropertyRng(options.seed, p.id);
    for (auto [pool, polarity] : {std::pair{&pos, Polarity::kPositive},
                                  std::pair{&neg, Polarity::kNegative}}) {
      if (pool->size() < options.medium_cap) {
        d.warnings.push_back("property '" + p.id + "': " + std::to_string(pool->size()) + "/" +
                             std::to_string(options.medium_cap) + " " + PolarityName(polarity) +
                             " examples available");
      }
      SeededShuffle(pool, rng);
      pool->resize(std::min(pool->size(), options.medium_cap));
      // Keep corpus order inside the sample so the dataset is order-stable.
      std::sort(pool->begin(), pool->end(), [&](const Sentence* a, const Sentence* b) {
        return *corpus.IndexOf(a->id) < *corpus.IndexOf(b->id);
      });
      const Provenance prov =
          polarity == Polarity::kPositive ? Provenance::kMajorityVote : Provenance::kAbsence;
      for (const Sentence* s : *pool) {
        d.examples.push_back(MakeExample(taxonomy, *s, f, p, polarity, prov, std::nullopt));
      }
    }
  }
  return d;
}

Dataset BuildLarge(const StoreView& view, const Taxonomy& taxonomy, const Corpus& corpus,
                   std::string_view feature_id, const BuildOptions& options) {
  const Feature& f = taxonomy.GetFeature(feature_id);
  Dataset d = NewDataset(DatasetKind::kLarge, view, f);
  VotePools pools = CollectVotes(view, corpus, f, options);
  d.drops = pools.drops;
  d.candidate_pairs = pools.candidates;
  if (pools.candidates == 0) {
    d.warnings.push_back("no human annotations for feature '" + f.id + "'");
  }
  for (const Property& p : f.properties) {
    auto& pos = pools.positive[p.id];
    auto& neg = pools.negative[p.id];
    if (options.downsample_negatives && neg.size() > pos.size()) {
      std::mt19937_64 rng = PropertyRng(options.seed, p.id);
      SeededShuffle(&neg, rng);
      d.drops.downsampled += neg.size() - pos.size();
      neg.resize(pos.size());
      std::sort(neg.begin(), neg.end(), [&](const Sentence* a, const Sentence* b) {
        return *corpus.IndexOf(a->id) < *corpus.IndexOf(b->id);
      });
    }
    for (const Sentence* s : pos) {
      d.examples.push_back(MakeExample(taxonomy, *s, f, p, Polarity::kPositive,
                                       Provenance::kMajorityVote, std::nullopt));
    }
    for (const Sentence* s : neg) {
      d.examples.push_back(MakeExample(taxonomy, *s, f, p, Polarity::kNegative,
                                       Provenance::kAbsence, std::nullopt));
    }
  }
  return d;
}

Dataset BuildDataset(DatasetKind kind, const StoreView& view, const Taxonomy& taxonomy,
                     const Corpus& corpus, std::string_view feature_id,
                     const BuildOptions& options) {
  switch (kind) {
    case DatasetKind::kSmall:
      return BuildSmall(view, taxonomy, corpus, feature_id, options);
    case DatasetKind::kMedium:
      return BuildMedium(view, taxonomy, corpus, feature_id, options);
    case DatasetKind::kLarge:
      return BuildLarge(view, taxonomy, corpus, feature_id, options);
  }
  throw InvalidArgument("unknown dataset kind");
}

EmitResult Emit(const Dataset& dataset, std::uint64_t seed) {
  if (dataset.examples.empty()) {
    throw InvalidArgument("dataset for feature '" + dataset.feature_id + "' is empty");
  }
  std::map<std::pair<std::string, Polarity>, std::vector<const TrainingExample*>> buckets;
  for (const TrainingExample& ex : dataset.examples) {
    buckets[{ex.property_id, ex.polarity}].push_back(&ex);
  }
  std::mt19937_64 rng(seed);
  for (auto& [key, bucket] : buckets) SeededShuffle(&bucket, rng);

  EmitResult out;
  DatasetManifest& m = out.manifest;
  m.kind = dataset.kind;
  m.feature_id = dataset.feature_id;
  m.source_snapshot = dataset.source_snapshot;
  m.seed = seed;
  m.drops = dataset.drops;
  m.candidate_pairs = dataset.candidate_pairs;
  m.warnings = dataset.warnings;

  std::vector<std::size_t> next(buckets.size(), 0);
  for (bool emitted = true; emitted;) {
    emitted = false;
    std::size_t b = 0;
    for (const auto& [key, bucket] : buckets) {
      if (next[b] < bucket.size()) {
        const TrainingExample& ex = *bucket[next[b]++];
        OrderedJson line;
        line["messages"] = OrderedJson::array(
            {{{"role", "system"}, {"content", ex.system_text}},
             {{"role", "user"}, {"content", ex.user_text}},
             {{"role", "assistant"}, {"content", ex.assistant_text}}});
        out.jsonl += line.dump() + "\n";
        PropertyCount& c = m.counts[ex.property_id];
        (ex.polarity == Polarity::kPositive ? c.positive : c.negative)++;
        m.lines.push_back(ex);
        emitted = true;
      }
      ++b;
    }
  }
  m.line_count = m.lines.size();
  m.digest = Sha256Digest(out.jsonl);
  return out;
}

std::string ManifestToJson(const DatasetManifest& m) {
  OrderedJson j;
  j["kind"] = DatasetKindName(m.kind);
  j["feature_id"] = m.feature_id;
  j["line_count"] = m.line_count;
  j["digest"] = m.digest;
  j["source_snapshot"] = m.source_snapshot;
  j["seed"] = m.seed;
  OrderedJson counts = OrderedJson::object();
  std::size_t pos_total = 0, neg_total = 0;
  for (const auto& [id, c] : m.counts) {
    counts[id] = {{"positive", c.positive}, {"negative", c.negative}};
    pos_total += c.positive;
    neg_total += c.negative;
  }
  j["counts"] = std::move(counts);
  j["totals"] = {{"positive", pos_total}, {"negative", neg_total}};
  // "Rows per property" is ambiguous between a per-property total and a
  // per-polarity figure; both are reported.
  const double n_props = m.counts.empty() ? 1.0 : static_cast<double>(m.counts.size());
  j["size_interpretations"] = {
      {"mean_rows_per_property", static_cast<double>(m.line_count) / n_props},
      {"mean_rows_per_property_polarity", static_cast<double>(m.line_count) / (2.0 * n_props)}};
  j["candidate_pairs"] = m.candidate_pairs;
  j["dropped"] = {{"minority", m.drops.minority},
                  {"single_annotator", m.drops.single_annotator},
                  {"excluded", m.drops.excluded},
                  {"downsampled", m.drops.downsampled},
                  {"total", m.drops.total()}};
  j["warnings"] = m.warnings;
  OrderedJson lines = OrderedJson::array();
  for (const TrainingExample& ex : m.lines) {
    lines.push_back({{"sentence_id", ex.sentence_id},
                     {"property_id", ex.property_id},
                     {"polarity", PolarityName(ex.polarity)},
                     {"provenance", ProvenanceName(ex.provenance)}});
  }
  j["lines"] = std::move(lines);
  return j.dump(2) + "\n";
}

DatasetManifest ManifestFromJson(std::string_view text) {
  DatasetManifest m;
  try {
    const Json j = Json::parse(text);
    const auto kind = ParseDatasetKind(j.at("kind").get<std::string>());
    if (!kind) throw DataError("manifest: unknown kind");
    m.kind = *kind;
    m.feature_id = j.at("feature_id").get<std::string>();
    m.line_count = j.at("line_count").get<std::size_t>();
    m.digest = j.at("digest").get<std::string>();
    m.source_snapshot = j.at("source_snapshot").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [id, c] : j.at("counts").items()) {
      m.counts[id] = {c.at("positive").get<std::size_t>(), c.at("negative").get<std::size_t>()};
    }
    m.candidate_pairs = j.at("candidate_pairs").get<std::size_t>();
    const Json& d = j.at("dropped");
    m.drops.minority = d.at("minority").get<std::size_t>();
    m.drops.single_annotator = d.at("single_annotator").get<std::size_t>();
    m.drops.excluded = d.at("excluded").get<std::size_t>();
    m.drops.downsampled = d.at("downsampled").get<std::size_t>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const Json& l : j.at("lines")) {
      TrainingExample ex;
      ex.feature_id = m.feature_id;
      ex.sentence_id = l.at("sentence_id").get<std::string>();
      ex.property_id = l.at("property_id").get<std::string>();
      ex.polarity = ParsePolarity(l.at("polarity").get<std::string>());
      ex.provenance = ParseProvenance(l.at("provenance").get<std::string>());
      m.lines.push_back(std::move(ex));
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::vector<TrainingExample> ParseTrainingFile(std::string_view jsonl,
                                               const DatasetManifest& manifest) {
  if (!manifest.digest.empty() && Sha256Digest(jsonl) != manifest.digest) {
    throw DataError("training file digest " + Sha256Digest(jsonl) + " does not match manifest " +
                    manifest.digest);
  }
  std::vector<TrainingExample> out;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    if (nl == std::string_view::npos) nl = jsonl.size();
    const std::string_view line = jsonl.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const std::size_t i = out.size();
    if (i >= manifest.lines.size()) throw DataError("training file has more lines than manifest");
    TrainingExample ex = manifest.lines[i];
    try {
      const Json j = Json::parse(line);
      const Json& msgs = j.at("messages");
      if (!msgs.is_array() || msgs.size() != 3) throw DataError("line " + std::to_string(i + 1) + ": expected 3 messages");
      const char* roles[] = {"system", "user", "assistant"};
      for (std::size_t r = 0; r < 3; ++r) {
        if (msgs[r].at("role").get<std::string>() != roles[r]) {
          throw DataError("line " + std::to_string(i + 1) + ": message " + std::to_string(r) +
                          " must have role " + roles[r]);
        }
      }
      ex.system_text = msgs[0].at("content").get<std::string>();
      ex.user_text = msgs[1].at("content").get<std::string>();
      ex.assistant_text = msgs[2].at("content").get<std::string>();
    } catch (const Json::exception& e) {
      throw DataError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    out.push_back(std::move(ex));
  }
  if (out.size() != manifest.lines.size()) {
    throw DataError("training file has " + std::to_string(out.size()) + " lines; manifest lists " +
                    std::to_string(manifest.lines.size()));
  }
  return out;
}

std::pair<std::string, std::string> WriteDataset(const std::string& dir,
                                                 const EmitResult& result) {
  std::filesystem::create_directories(dir);
  const std::string stem = (std::filesystem::path(dir) / (result.manifest.feature_id + "-" +
                                                          DatasetKindName(result.manifest.kind)))
                               .string();
  const std::string data = stem + ".jsonl";
  const std::string manifest = stem + ".manifest.json";
  WriteFile(data, result.jsonl);
  WriteFile(manifest, ManifestToJson(result.manifest));
  return {data, manifest};
}

}  // namespace rhetann
