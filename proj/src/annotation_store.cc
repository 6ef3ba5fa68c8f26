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

#include "rhetann/annotation_store.h"

#include <unistd.h>

#include <algorithm>
#include <cinttypes>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

ExchangeKey ExchangeKey::Of(const AssistantExchange& e) {
  return ExchangeKey{e.sentence_id,
                     e.feature_id,
                     e.prompt_version,
                     e.request.property_id.value_or(""),
                     e.model,
                     FormatTemperature(e.temperature)};
}

namespace {

constexpr const char* kTypeAnnotation = "annotation";
constexpr const char* kTypeExchange = "exchange";
constexpr const char* kTypeGroundTruth = "ground_truth";
constexpr const char* kTypeErrorTag = "error_tag";
constexpr const char* kTypeUsage = "usage";
constexpr const char* kTypeSession = "session";

template <typename T>
std::string RecordLine(const char* type, const T& record) {
  Json j = ToJson(record);
  j["type"] = type;
  return j.dump();
}

std::string FormatExchangeId(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ex-%06" PRIu64, n);
  return buf;
}

std::uint64_t ExchangeSeq(const std::string& id) {
  if (id.rfind("ex-", 0) != 0) return 0;
  try {
    return std::stoull(id.substr(3));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

// --- StoreView -------------------------------------------------------------

void StoreView::Apply(AnnotationRecord r) {
  next_revision_ = std::max(next_revision_, r.revision + 1);
  annotator_kinds_.emplace(r.annotator.id, r.annotator.kind);
  const std::size_t idx = annotations_.size();
  AnnKey key{r.sentence_id, r.annotator.id, r.feature_id};
  annotations_.push_back(std::move(r));
  auto it = latest_.find(key);
  // Last writer by timestamp wins; equal timestamps fall back to append order.
  if (it == latest_.end()) {
    latest_.emplace(std::move(key), idx);
  } else if (annotations_[it->second].timestamp <= annotations_[idx].timestamp) {
    it->second = idx;
  }
  order_.push_back(Ref{Kind::kAnnotation, idx});
}

void StoreView::Apply(AssistantExchange e) {
  next_exchange_ = std::max(next_exchange_, ExchangeSeq(e.id) + 1);
  const std::size_t idx = exchanges_.size();
  const ExchangeKey key = ExchangeKey::Of(e);
  exchange_ids_[e.id] = idx;
  exchanges_.push_back(std::move(e));
  auto it = latest_exchange_.find(key);
  if (it == latest_exchange_.end()) {
    latest_exchange_.emplace(key, idx);
  } else if (exchanges_[it->second].timestamp <= exchanges_[idx].timestamp) {
    it->second = idx;
  }
  order_.push_back(Ref{Kind::kExchange, idx});
}

void StoreView::Apply(GroundTruthLabel g) {
  const std::size_t idx = ground_truth_.size();
  std::pair<std::string, std::string> key{g.sentence_id, g.feature_id};
  ground_truth_.push_back(std::move(g));
  auto it = latest_truth_.find(key);
  if (it == latest_truth_.end()) {
    latest_truth_.emplace(std::move(key), idx);
  } else if (ground_truth_[it->second].timestamp <= ground_truth_[idx].timestamp) {
    it->second = idx;
  }
  order_.push_back(Ref{Kind::kGroundTruth, idx});
}

void StoreView::Apply(ErrorTag t) {
  tags_.push_back(std::move(t));
  order_.push_back(Ref{Kind::kErrorTag, tags_.size() - 1});
}

void StoreView::Apply(UsageLedgerEntry u) {
  usage_.push_back(std::move(u));
  order_.push_back(Ref{Kind::kUsage, usage_.size() - 1});
}

void StoreView::Apply(SessionState s) {
  const std::size_t idx = session_log_.size();
  latest_session_[s.session_id] = idx;
  session_log_.push_back(std::move(s));
  order_.push_back(Ref{Kind::kSession, idx});
}

std::string StoreView::Line(const Ref& ref) const {
  switch (ref.kind) {
    case Kind::kAnnotation:
      return RecordLine(kTypeAnnotation, annotations_[ref.index]);
    case Kind::kExchange:
      return RecordLine(kTypeExchange, exchanges_[ref.index]);
    case Kind::kGroundTruth:
      return RecordLine(kTypeGroundTruth, ground_truth_[ref.index]);
    case Kind::kErrorTag:
      return RecordLine(kTypeErrorTag, tags_[ref.index]);
    case Kind::kUsage:
      return RecordLine(kTypeUsage, usage_[ref.index]);
    case Kind::kSession:
      return RecordLine(kTypeSession, session_log_[ref.index]);
  }
  return {};
}

std::string StoreView::Export() const {
  std::string out;
  for (const Ref& ref : order_) {
    out += Line(ref);
    out.push_back('\n');
  }
  return out;
}

std::optional<AnnotationRecord> StoreView::Latest(std::string_view sentence_id,
                                                  std::string_view annotator_id,
                                                  std::string_view feature_id) const {
  auto it = latest_.find(AnnKey{std::string(sentence_id), std::string(annotator_id),
                                std::string(feature_id)});
  if (it == latest_.end()) return std::nullopt;
  return annotations_[it->second];
}

std::vector<AnnotationRecord> StoreView::History(std::string_view sentence_id,
                                                 std::string_view annotator_id,
                                                 std::string_view feature_id) const {
  std::vector<AnnotationRecord> out;
  for (const AnnotationRecord& r : annotations_) {
    if (r.sentence_id == sentence_id && r.annotator.id == annotator_id &&
        r.feature_id == feature_id) {
      out.push_back(r);
    }
  }
  return out;
}

std::vector<AnnotationRecord> StoreView::LatestAnnotations() const {
  std::vector<AnnotationRecord> out;
  out.reserve(latest_.size());
  for (const auto& [key, idx] : latest_) out.push_back(annotations_[idx]);
  return out;
}

AnnotationMatrix StoreView::Matrix(std::string_view feature_id,
                                   const std::vector<std::string>& annotators) const {
  if (taxonomy_ && taxonomy_->FindFeature(feature_id) == nullptr) {
    throw NotFound("unknown feature id '" + std::string(feature_id) + "'");
  }
  AnnotationMatrix m;
  m.feature_id = std::string(feature_id);
  m.annotators = annotators;
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < annotators.size(); ++i) column.emplace(annotators[i], i);

  std::map<std::string, AnnotationRow> rows;
  for (const auto& [key, idx] : latest_) {
    const auto& [sentence, annotator, feature] = key;
    if (feature != feature_id) continue;
    auto col = column.find(annotator);
    if (col == column.end()) continue;
    AnnotationRow& row = rows[sentence];
    if (row.values.empty()) {
      row.sentence_id = sentence;
      row.values.resize(annotators.size());
    }
    row.values[col->second] = annotations_[idx].properties;
  }
  for (auto& [id, row] : rows) m.rows.push_back(std::move(row));
  return m;
}

std::vector<AnnotatorId> StoreView::Annotators() const {
  std::vector<AnnotatorId> out;
  for (const auto& [id, kind] : annotator_kinds_) out.push_back(AnnotatorId{id, kind});
  std::sort(out.begin(), out.end(),
            [](const AnnotatorId& a, const AnnotatorId& b) { return a.id < b.id; });
  return out;
}

const AssistantExchange* StoreView::FindExchange(std::string_view id) const {
  auto it = exchange_ids_.find(std::string(id));
  return it == exchange_ids_.end() ? nullptr : &exchanges_[it->second];
}

const AssistantExchange* StoreView::LatestExchange(const ExchangeKey& key) const {
  auto it = latest_exchange_.find(key);
  return it == latest_exchange_.end() ? nullptr : &exchanges_[it->second];
}

std::optional<GroundTruthLabel> StoreView::GroundTruth(std::string_view sentence_id,
                                                       std::string_view feature_id) const {
  auto it = latest_truth_.find({std::string(sentence_id), std::string(feature_id)});
  if (it == latest_truth_.end()) return std::nullopt;
  return ground_truth_[it->second];
}

std::vector<GroundTruthLabel> StoreView::GroundTruthFor(std::string_view feature_id) const {
  std::vector<GroundTruthLabel> out;
  for (const auto& [key, idx] : latest_truth_) {
    if (key.second == feature_id) out.push_back(ground_truth_[idx]);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.sentence_id < b.sentence_id;
  });
  return out;
}

std::optional<SessionState> StoreView::Session(std::string_view session_id) const {
  auto it = latest_session_.find(std::string(session_id));
  if (it == latest_session_.end()) return std::nullopt;
  return session_log_[it->second];
}

std::vector<SessionState> StoreView::Sessions() const {
  std::vector<SessionState> out;
  for (const auto& [id, idx] : latest_session_) out.push_back(session_log_[idx]);
  return out;
}

// --- AnnotationStore -------------------------------------------------------

AnnotationStore::AnnotationStore(std::shared_ptr<const Taxonomy> taxonomy,
                                 std::shared_ptr<const Corpus> corpus)
    : taxonomy_(std::move(taxonomy)), corpus_(std::move(corpus)) {
  if (!taxonomy_) throw InvalidArgument("annotation store requires a taxonomy");
  view_.taxonomy_ = taxonomy_;
}

AnnotationStore::~AnnotationStore() {
  if (file_ != nullptr) std::fclose(file_);
}

std::unique_ptr<AnnotationStore> AnnotationStore::Open(
    const std::string& path, std::shared_ptr<const Taxonomy> taxonomy,
    std::shared_ptr<const Corpus> corpus, StoreOptions options) {
  auto store = std::make_unique<AnnotationStore>(std::move(taxonomy), std::move(corpus));
  store->options_ = options;
  store->path_ = path;

  std::string text;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t valid_bytes = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    if (!terminated) nl = text.size();
    const std::string_view line(text.data() + pos, nl - pos);
    ++line_no;
    const bool last = !terminated || nl + 1 >= text.size();
    try {
      if (!terminated) throw DataError("unterminated final record");
      if (!line.empty()) store->ApplyLine(line);
      valid_bytes = nl + 1;
    } catch (const Error& e) {
      if (!last) {
        throw DataError("store '" + path + "' line " + std::to_string(line_no) +
                        ": " + e.what());
      }
      store->replay_warnings_.push_back("dropped torn record at line " +
                                        std::to_string(line_no) + ": " + e.what());
    }
    pos = nl + 1;
  }
  if (valid_bytes < text.size()) std::filesystem::resize_file(path, valid_bytes);

  store->file_ = std::fopen(path.c_str(), "ab");
  if (store->file_ == nullptr) throw DataError("cannot open store '" + path + "' for append");
  return store;
}

void AnnotationStore::ApplyLine(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw DataError("record lacks a 'type' field");
  }
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == kTypeAnnotation) {
      view_.Apply(AnnotationRecordFromJson(j));
    } else if (type == kTypeExchange) {
      view_.Apply(AssistantExchangeFromJson(j));
    } else if (type == kTypeGroundTruth) {
      view_.Apply(GroundTruthLabelFromJson(j));
    } else if (type == kTypeErrorTag) {
      view_.Apply(ErrorTagFromJson(j));
    } else if (type == kTypeUsage) {
      view_.Apply(UsageLedgerEntryFromJson(j));
    } else if (type == kTypeSession) {
      view_.Apply(SessionStateFromJson(j));
    } else {
      throw DataError("unknown record type '" + type + "'");
    }
  } catch (const Json::exception& e) {
    throw DataError(type + " record: " + e.what());
  }
  ++version_;
}

void AnnotationStore::Persist(const std::string& line) {
  if (file_ == nullptr) return;
  const std::string with_nl = line + "\n";
  if (std::fwrite(with_nl.data(), 1, with_nl.size(), file_) != with_nl.size() ||
      std::fflush(file_) != 0) {
    throw DataError("failed to append to store '" + path_ + "'");
  }
  if (options_.sync_writes) ::fsync(::fileno(file_));
}

void AnnotationStore::Validate(const AnnotationRecord& record) const {
  std::shared_lock lock(mu_);
  if (record.sentence_id.empty()) throw ValidationError("empty sentence_id");
  if (record.annotator.id.empty()) throw ValidationError("empty annotator id");
  const Feature* feature = taxonomy_->FindFeature(record.feature_id);
  if (feature == nullptr) {
    throw ValidationError("unknown feature id '" + record.feature_id + "'");
  }
  for (const std::string& p : record.properties) {
    if (feature->FindProperty(p) == nullptr) {
      throw ValidationError("property '" + p + "' is not a property of feature '" +
                            feature->id + "'");
    }
  }
  if (corpus_) {
    const Sentence* s = corpus_->Find(record.sentence_id);
    if (s == nullptr) {
      throw ValidationError("unknown sentence id '" + record.sentence_id + "'");
    }
    if (record.node_path && s->tree.Resolve(*record.node_path) == nullptr) {
      throw ValidationError("node path " + FormatNodePath(*record.node_path) +
                            " does not resolve in sentence '" + s->id + "'");
    }
  }
  auto kind = view_.annotator_kinds_.find(record.annotator.id);
  if (kind != view_.annotator_kinds_.end() && kind->second != record.annotator.kind) {
    throw ValidationError("annotator '" + record.annotator.id + "' is registered as " +
                          AnnotatorKindName(kind->second));
  }
}

std::uint64_t AnnotationStore::Submit(AnnotationRecord record) {
  Validate(record);
  std::unique_lock lock(mu_);
  // Re-check the kind under the writer lock; Validate ran under a shared one.
  auto kind = view_.annotator_kinds_.find(record.annotator.id);
  if (kind != view_.annotator_kinds_.end() && kind->second != record.annotator.kind) {
    throw ValidationError("annotator '" + record.annotator.id + "' changed kind");
  }
  record.revision = view_.next_revision_;
  Persist(RecordLine(kTypeAnnotation, record));
  const std::uint64_t rev = record.revision;
  view_.Apply(std::move(record));
  ++version_;
  return rev;
}

std::string AnnotationStore::AppendExchange(AssistantExchange exchange) {
  return AppendExchangeAndDerive(std::move(exchange), nullptr).first;
}

std::pair<std::string, std::optional<std::uint64_t>>
AnnotationStore::AppendExchangeAndDerive(
    AssistantExchange exchange,
    const std::function<std::optional<AnnotationRecord>(const StoreView&,
                                                        const AssistantExchange&)>&
        derive) {
  if (exchange.responses.empty()) {
    throw InvalidArgument("an exchange needs at least one response");
  }
  std::optional<AnnotationRecord> derived;
  std::string id;
  {
    std::unique_lock lock(mu_);
    exchange.id = FormatExchangeId(view_.next_exchange_);
    id = exchange.id;
    Persist(RecordLine(kTypeExchange, exchange));
    view_.Apply(std::move(exchange));
    ++version_;
    if (derive) derived = derive(view_, view_.exchanges_.back());
  }
  if (!derived) return {id, std::nullopt};
  return {id, Submit(std::move(*derived))};
}

void AnnotationStore::AppendUsage(UsageLedgerEntry entry) {
  std::unique_lock lock(mu_);
  Persist(RecordLine(kTypeUsage, entry));
  view_.Apply(std::move(entry));
  ++version_;
}

void AnnotationStore::PutGroundTruth(GroundTruthLabel label) {
  const Feature& f = taxonomy_->GetFeature(label.feature_id);
  for (const std::string& p : label.properties) {
    if (f.FindProperty(p) == nullptr) {
      throw ValidationError("property '" + p + "' is not a property of feature '" +
                            f.id + "'");
    }
  }
  if (corpus_ && corpus_->Find(label.sentence_id) == nullptr) {
    throw ValidationError("unknown sentence id '" + label.sentence_id + "'");
  }
  std::unique_lock lock(mu_);
  Persist(RecordLine(kTypeGroundTruth, label));
  view_.Apply(std::move(label));
  ++version_;
}

void AnnotationStore::AppendErrorTag(ErrorTag tag) {
  std::unique_lock lock(mu_);
  if (view_.FindExchange(tag.exchange_id) == nullptr) {
    throw NotFound("unknown exchange '" + tag.exchange_id + "'");
  }
  Persist(RecordLine(kTypeErrorTag, tag));
  view_.Apply(std::move(tag));
  ++version_;
}

void AnnotationStore::PutSession(SessionState session) {
  std::unique_lock lock(mu_);
  Persist(RecordLine(kTypeSession, session));
  view_.Apply(std::move(session));
  ++version_;
}

std::shared_ptr<const StoreView> AnnotationStore::Snapshot() const {
  std::lock_guard guard(snapshot_mu_);
  std::shared_lock lock(mu_);
  if (!snapshot_ || snapshot_version_ != version_) {
    snapshot_ = std::make_shared<const StoreView>(view_);
    snapshot_version_ = version_;
  }
  return snapshot_;
}

std::optional<AnnotationRecord> AnnotationStore::Latest(std::string_view sentence_id,
                                                        std::string_view annotator_id,
                                                        std::string_view feature_id) const {
  std::shared_lock lock(mu_);
  return view_.Latest(sentence_id, annotator_id, feature_id);
}

bool AnnotationStore::HasExchange(const ExchangeKey& key) const {
  std::shared_lock lock(mu_);
  return view_.LatestExchange(key) != nullptr;
}

std::optional<AssistantExchange> AnnotationStore::LatestExchange(const ExchangeKey& key) const {
  std::shared_lock lock(mu_);
  const AssistantExchange* e = view_.LatestExchange(key);
  if (e == nullptr) return std::nullopt;
  return *e;
}

std::optional<SessionState> AnnotationStore::Session(std::string_view session_id) const {
  std::shared_lock lock(mu_);
  return view_.Session(session_id);
}

void AnnotationStore::Import(std::string_view export_text) {
  std::unique_lock lock(mu_);
  if (!view_.order_.empty()) {
    throw InvalidArgument("import requires an empty store");
  }
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < export_text.size()) {
    std::size_t nl = export_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = export_text.size();
    const std::string_view line = export_text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (line.empty()) continue;
    try {
      ApplyLine(line);
    } catch (const Error& e) {
      throw DataError("import line " + std::to_string(line_no) + ": " + e.what());
    }
    Persist(view_.Line(view_.order_.back()));
  }
}

std::string AnnotationStore::Export() const {
  std::shared_lock lock(mu_);
  return view_.Export();
}

void AnnotationStore::Compact() {
  std::unique_lock lock(mu_);
  StoreView compacted;
  compacted.taxonomy_ = taxonomy_;
  for (const StoreView::Ref& ref : view_.order_) {
    switch (ref.kind) {
      case StoreView::Kind::kAnnotation:
        compacted.Apply(view_.annotations_[ref.index]);
        break;
      case StoreView::Kind::kExchange:
        compacted.Apply(view_.exchanges_[ref.index]);
        break;
      case StoreView::Kind::kGroundTruth:
        compacted.Apply(view_.ground_truth_[ref.index]);
        break;
      case StoreView::Kind::kErrorTag:
        compacted.Apply(view_.tags_[ref.index]);
        break;
      case StoreView::Kind::kUsage:
        compacted.Apply(view_.usage_[ref.index]);
        break;
      case StoreView::Kind::kSession: {
        const SessionState& s = view_.session_log_[ref.index];
        if (view_.latest_session_.at(s.session_id) == ref.index) compacted.Apply(s);
        break;
      }
    }
  }
  if (file_ != nullptr) {
    const std::string tmp = path_ + ".compact";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << compacted.Export();
      if (!out) throw DataError("failed to write '" + tmp + "'");
    }
    std::fclose(file_);
    file_ = nullptr;
    std::filesystem::rename(tmp, path_);
    file_ = std::fopen(path_.c_str(), "ab");
    if (file_ == nullptr) throw DataError("cannot reopen store '" + path_ + "'");
  }
  view_ = std::move(compacted);
  ++version_;
}

}  // namespace rhetann
