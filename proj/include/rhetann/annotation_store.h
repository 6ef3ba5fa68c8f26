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

#ifndef RHETANN_ANNOTATION_STORE_H_
#define RHETANN_ANNOTATION_STORE_H_

#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "rhetann/corpus.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

// One row of an annotation matrix: the per-annotator values for a sentence,
// aligned with the annotator list. nullopt means the annotator has no record
// for the feature (absent), which is distinct from an empty set.
struct AnnotationRow {
  std::string sentence_id;
  std::vector<std::optional<PropertySet>> values;

  bool operator==(const AnnotationRow&) const = default;
};

struct AnnotationMatrix {
  std::string feature_id;
  std::vector<std::string> annotators;
  std::vector<AnnotationRow> rows;  // sorted by sentence id
};

// Identifies the prompt an exchange answers; campaigns use it as their
// checkpoint key.
struct ExchangeKey {
  std::string sentence_id;
  std::string feature_id;
  PromptVersion version = PromptVersion::kV1;
  std::string property_id;  // empty for V1
  std::string model;
  std::string temperature;  // FormatTemperature

  static ExchangeKey Of(const AssistantExchange& e);
  auto operator<=>(const ExchangeKey&) const = default;
};

// Immutable view of every record in a store, with latest-per-key indexes.
class StoreView {
 public:
  std::optional<AnnotationRecord> Latest(std::string_view sentence_id,
                                         std::string_view annotator_id,
                                         std::string_view feature_id) const;
  // All revisions for a key in append order.
  std::vector<AnnotationRecord> History(std::string_view sentence_id,
                                        std::string_view annotator_id,
                                        std::string_view feature_id) const;
  // Latest record for every key, ordered by (sentence, annotator, feature).
  std::vector<AnnotationRecord> LatestAnnotations() const;
  const std::vector<AnnotationRecord>& AllRevisions() const { return annotations_; }

  // Throws NotFound for a feature id the store's taxonomy lacks.
  AnnotationMatrix Matrix(std::string_view feature_id,
                          const std::vector<std::string>& annotators) const;

  // Annotator ids with at least one record, sorted.
  std::vector<AnnotatorId> Annotators() const;

  const std::vector<AssistantExchange>& Exchanges() const { return exchanges_; }
  const AssistantExchange* FindExchange(std::string_view id) const;
  const AssistantExchange* LatestExchange(const ExchangeKey& key) const;

  std::optional<GroundTruthLabel> GroundTruth(std::string_view sentence_id,
                                              std::string_view feature_id) const;
  // Latest label per (sentence, feature) for one feature, sorted by sentence.
  std::vector<GroundTruthLabel> GroundTruthFor(std::string_view feature_id) const;

  const std::vector<ErrorTag>& ErrorTags() const { return tags_; }
  const std::vector<UsageLedgerEntry>& Usage() const { return usage_; }

  std::optional<SessionState> Session(std::string_view session_id) const;
  std::vector<SessionState> Sessions() const;

  std::size_t record_count() const { return order_.size(); }

  // Canonical export: one JSON record per line in append order.
  std::string Export() const;

 private:
  friend class AnnotationStore;

  enum class Kind { kAnnotation, kExchange, kGroundTruth, kErrorTag, kUsage, kSession };
  struct Ref {
    Kind kind;
    std::size_t index;
  };
  using AnnKey = std::tuple<std::string, std::string, std::string>;

  std::string Line(const Ref& ref) const;
  void Apply(AnnotationRecord r);
  void Apply(AssistantExchange e);
  void Apply(GroundTruthLabel g);
  void Apply(ErrorTag t);
  void Apply(UsageLedgerEntry u);
  void Apply(SessionState s);

  std::shared_ptr<const Taxonomy> taxonomy_;
  std::vector<Ref> order_;
  std::vector<AnnotationRecord> annotations_;
  std::map<AnnKey, std::size_t> latest_;
  std::unordered_map<std::string, AnnotatorKind> annotator_kinds_;
  std::vector<AssistantExchange> exchanges_;
  std::unordered_map<std::string, std::size_t> exchange_ids_;
  std::map<ExchangeKey, std::size_t> latest_exchange_;
  std::vector<GroundTruthLabel> ground_truth_;
  std::map<std::pair<std::string, std::string>, std::size_t> latest_truth_;
  std::vector<ErrorTag> tags_;
  std::vector<UsageLedgerEntry> usage_;
  std::vector<SessionState> session_log_;
  std::map<std::string, std::size_t> latest_session_;
  std::uint64_t next_revision_ = 1;
  std::uint64_t next_exchange_ = 1;
};

struct StoreOptions {
  // fsync after every append in addition to flushing.
  bool sync_writes = false;
};

// Append-only annotation log. A single mutex serializes writers; readers use
// a shared lock or take an immutable Snapshot().
//
// Persistence is newline-delimited JSON, each line tagged with "type". On
// open the log is replayed; a truncated final line (torn write) is dropped
// and reported in replay_warnings().
class AnnotationStore {
 public:
  // In-memory store. `corpus` may be null, in which case sentence ids are not
  // checked on submit.
  explicit AnnotationStore(std::shared_ptr<const Taxonomy> taxonomy,
                           std::shared_ptr<const Corpus> corpus = nullptr);
  ~AnnotationStore();

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  // Opens (creating if needed) a file-backed store and replays it.
  static std::unique_ptr<AnnotationStore> Open(
      const std::string& path, std::shared_ptr<const Taxonomy> taxonomy,
      std::shared_ptr<const Corpus> corpus = nullptr, StoreOptions options = {});

  // Validates and appends. Returns the revision id. Throws ValidationError
  // for unresolved ids, properties outside the feature, a node path that does
  // not resolve, or an annotator whose kind changed.
  std::uint64_t Submit(AnnotationRecord record);
  // Checks what Submit would check without writing.
  void Validate(const AnnotationRecord& record) const;

  // Appends an exchange and returns its assigned id. Requires at least one response.
  std::string AppendExchange(AssistantExchange exchange);
  // Appends an exchange and, atomically with it, the annotation record
  // derived by `derive` from the view that includes the exchange.
  std::pair<std::string, std::optional<std::uint64_t>> AppendExchangeAndDerive(
      AssistantExchange exchange,
      const std::function<std::optional<AnnotationRecord>(const StoreView&,
                                                          const AssistantExchange&)>&
          derive);
  void AppendUsage(UsageLedgerEntry entry);
  void PutGroundTruth(GroundTruthLabel label);
  // Throws NotFound if the exchange does not exist.
  void AppendErrorTag(ErrorTag tag);
  void PutSession(SessionState session);

  // Snapshot reflecting every write that completed before the call.
  std::shared_ptr<const StoreView> Snapshot() const;

  // Cheap locked point reads.
  std::optional<AnnotationRecord> Latest(std::string_view sentence_id,
                                         std::string_view annotator_id,
                                         std::string_view feature_id) const;
  bool HasExchange(const ExchangeKey& key) const;
  std::optional<AssistantExchange> LatestExchange(const ExchangeKey& key) const;
  std::optional<SessionState> Session(std::string_view session_id) const;

  // Appends every record of a canonical export, preserving revision and
  // exchange ids. Records are not re-validated.
  void Import(std::string_view export_text);
  std::string Export() const;

  // Rewrites the log dropping superseded session states. Annotation
  // revisions are kept. No-op for in-memory stores.
  void Compact();

  const std::vector<std::string>& replay_warnings() const { return replay_warnings_; }
  const Taxonomy& taxonomy() const { return *taxonomy_; }
  const Corpus* corpus() const { return corpus_.get(); }
  const std::string& path() const { return path_; }

 private:
  void ApplyLine(std::string_view line);
  void Persist(const std::string& line);

  std::shared_ptr<const Taxonomy> taxonomy_;
  std::shared_ptr<const Corpus> corpus_;
  StoreOptions options_;
  std::string path_;
  std::FILE* file_ = nullptr;

  mutable std::shared_mutex mu_;
  StoreView view_;
  std::uint64_t version_ = 0;
  mutable std::mutex snapshot_mu_;
  mutable std::shared_ptr<const StoreView> snapshot_;
  mutable std::uint64_t snapshot_version_ = 0;
  std::vector<std::string> replay_warnings_;
};

}  // namespace rhetann

#endif  // RHETANN_ANNOTATION_STORE_H_
