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

#include "rhetann/workbench.h"

#include <random>

#include "rhetann/campaign.h"
#include "rhetann/error.h"
#include "rhetann/prompt.h"

namespace rhetann {

Workbench::Workbench(AnnotationStore& store, std::shared_ptr<const Corpus> corpus,
                     std::shared_ptr<Gateway> gateway, std::optional<ModelProfile> assistant,
                     WorkbenchOptions options)
    : store_(store),
      corpus_(std::move(corpus)),
      gateway_(std::move(gateway)),
      assistant_(std::move(assistant)),
      options_(std::move(options)),
      features_(store.taxonomy().ManualFeatures()) {
  if (!corpus_) throw InvalidArgument("workbench requires a corpus");
  if (options_.assistant_capture && assistant_enabled()) {
    capture_thread_ = std::thread([this] { CaptureLoop(); });
  }
}

Workbench::~Workbench() {
  {
    std::lock_guard lock(capture_mu_);
    stopping_ = true;
  }
  capture_cv_.notify_all();
  if (capture_thread_.joinable()) capture_thread_.join();
}

bool Workbench::ValidCursor(const SessionCursor& c) const {
  if (c.sentence_index == corpus_->size()) return c.feature_index == 0;
  return c.sentence_index < corpus_->size() && c.feature_index < features_.size();
}

SessionCursor Workbench::Advance(SessionCursor c) const {
  if (++c.feature_index >= features_.size()) {
    c.feature_index = 0;
    ++c.sentence_index;
  }
  return c;
}

SessionState Workbench::StartSession(const std::string& session_id,
                                     const AnnotatorId& annotator) {
  if (annotator.id.empty()) throw InvalidArgument("annotator id must be non-empty");
  std::lock_guard lock(session_mu_);
  std::string id = session_id;
  if (id.empty()) {
    std::random_device rd;
    char buf[32];
    do {
      std::snprintf(buf, sizeof(buf), "s-%08x%08x", rd(), rd());
      id = buf;
    } while (store_.Session(id));
  }
  if (auto existing = store_.Session(id)) {
    if (existing->annotator != annotator) {
      throw ValidationError("session '" + id + "' belongs to annotator '" +
                            existing->annotator.id + "'");
    }
    return *existing;
  }
  SessionState s{id, annotator, SessionCursor{}, options_.clock()};
  store_.PutSession(s);
  return s;
}

SessionState Workbench::GetSession(const std::string& session_id) const {
  auto s = store_.Session(session_id);
  if (!s) throw NotFound("unknown session '" + session_id + "'");
  return *s;
}

std::optional<WorkItem> Workbench::Next(const std::string& session_id) const {
  const SessionState s = GetSession(session_id);
  if (s.cursor.sentence_index >= corpus_->size() || features_.empty()) return std::nullopt;
  WorkItem item;
  item.cursor = s.cursor;
  item.sentence = &corpus_->sentences()[s.cursor.sentence_index];
  item.feature = features_[s.cursor.feature_index];
  item.existing = store_.Latest(item.sentence->id, s.annotator.id, item.feature->id);
  return item;
}

SessionState Workbench::SetCursor(const std::string& session_id, SessionCursor cursor) {
  std::lock_guard lock(session_mu_);
  SessionState s = GetSession(session_id);
  if (!ValidCursor(cursor)) {
    throw InvalidArgument("cursor (" + std::to_string(cursor.sentence_index) + ", " +
                          std::to_string(cursor.feature_index) + ") is out of range");
  }
  s.cursor = cursor;
  store_.PutSession(s);
  return s;
}

SubmitResult Workbench::Submit(const std::optional<std::string>& session_id,
                               AnnotationRecord record) {
  if (record.timestamp == Timestamp{}) record.timestamp = options_.clock();
  const Feature* feature = store_.taxonomy().FindFeature(record.feature_id);
  const std::string sentence_id = record.sentence_id;
  SubmitResult result;
  if (session_id) {
    std::lock_guard lock(session_mu_);
    SessionState s = GetSession(*session_id);
    if (!record.annotator.id.empty() && record.annotator != s.annotator) {
      throw ValidationError("record annotator '" + record.annotator.id +
                            "' does not own session '" + s.session_id + "'");
    }
    record.annotator = s.annotator;
    record.session_id = s.session_id;
    result.revision = store_.Submit(std::move(record));
    if (s.cursor.sentence_index < corpus_->size() && !features_.empty() &&
        corpus_->sentences()[s.cursor.sentence_index].id == sentence_id &&
        features_[s.cursor.feature_index] == feature) {
      s.cursor = Advance(s.cursor);
      store_.PutSession(s);
    }
    result.cursor = s.cursor;
  } else {
    result.revision = store_.Submit(std::move(record));
  }

  if (options_.assistant_capture && assistant_enabled() && feature != nullptr &&
      feature->is_manual()) {
    {
      std::lock_guard lock(capture_mu_);
      captures_.push_back({sentence_id, feature->id});
    }
    capture_cv_.notify_one();
    result.capture_queued = true;
  }
  return result;
}

AssistResult Workbench::Assist(const std::string& sentence_id, const std::string& feature_id) {
  if (!assistant_enabled()) throw TransportError("no assistant model is configured");
  const Taxonomy& taxonomy = store_.taxonomy();
  const Feature& feature = taxonomy.GetFeature(feature_id);
  if (!feature.is_manual()) {
    throw InvalidArgument("feature '" + feature.id + "' is not annotated manually");
  }
  const Sentence& sentence = corpus_->Get(sentence_id);
  const PromptSpec prompt = BuildV1(taxonomy, feature.id, sentence.text, sentence.id);
  const ExchangeKey key = KeyFor(prompt, assistant_->name, options_.assistant_temperature);
  if (auto cached = store_.LatestExchange(key)) return {std::move(*cached), true};

  CallPolicy policy = CallPolicy::Production();
  policy.temperature = options_.assistant_temperature;
  AssistantExchange e;
  e.sentence_id = sentence.id;
  e.feature_id = feature.id;
  e.prompt_version = PromptVersion::kV1;
  e.request = prompt;
  e.responses = gateway_->Complete(prompt, *assistant_, policy);
  e.model = assistant_->name;
  e.temperature = options_.assistant_temperature;
  e.timestamp = options_.clock();
  e.id = store_.AppendExchange(e);
  return {std::move(e), false};
}

void Workbench::CaptureLoop() {
  for (;;) {
    CaptureTask task;
    {
      std::unique_lock lock(capture_mu_);
      capture_cv_.wait(lock, [&] { return stopping_ || !captures_.empty(); });
      if (captures_.empty()) return;
      task = std::move(captures_.front());
      captures_.pop_front();
      ++capture_running_;
    }
    try {
      Assist(task.sentence_id, task.feature_id);
    } catch (const std::exception&) {
      // The failed attempt is in the usage ledger; submission is unaffected.
    }
    {
      std::lock_guard lock(capture_mu_);
      --capture_running_;
    }
    idle_cv_.notify_all();
  }
}

void Workbench::WaitForCaptures() {
  std::unique_lock lock(capture_mu_);
  idle_cv_.wait(lock, [&] { return captures_.empty() && capture_running_ == 0; });
}

Progress Workbench::GetProgress() const {
  Progress p;
  const auto view = store_.Snapshot();
  for (const AnnotationRecord& r : view->LatestAnnotations()) {
    ++p.by_annotator[r.annotator.id][r.feature_id];
    ++p.total_records;
  }
  std::lock_guard lock(capture_mu_);
  p.pending_captures = captures_.size() + capture_running_;
  return p;
}

}  // namespace rhetann
