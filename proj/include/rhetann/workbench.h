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

#ifndef RHETANN_WORKBENCH_H_
#define RHETANN_WORKBENCH_H_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rhetann/annotation_store.h"
#include "rhetann/corpus.h"
#include "rhetann/gateway.h"
#include "rhetann/records.h"
#include "rhetann/taxonomy.h"

namespace rhetann {

struct WorkbenchOptions {
  // Request a V1 exchange in the background after every submission.
  bool assistant_capture = false;
  double assistant_temperature = 0.0;
  Clock clock = SystemNow;
};

struct WorkItem {
  SessionCursor cursor;
  const Sentence* sentence = nullptr;
  const Feature* feature = nullptr;
  std::optional<AnnotationRecord> existing;  // this annotator's latest record
};

struct SubmitResult {
  std::uint64_t revision = 0;
  bool capture_queued = false;
  std::optional<SessionCursor> cursor;  // the session cursor after submit
};

struct AssistResult {
  AssistantExchange exchange;
  bool cached = false;
};

// Record counts per annotator and feature over latest records.
struct Progress {
  std::map<std::string, std::map<std::string, std::size_t>> by_annotator;
  std::size_t total_records = 0;
  std::size_t pending_captures = 0;
};

// Library layer behind the annotation server; every endpoint maps onto one
// method here. Traversal is sentence-major over the manual features.
class Workbench {
 public:
  // `gateway` and `assistant` may be null, which disables assistance.
  Workbench(AnnotationStore& store, std::shared_ptr<const Corpus> corpus,
            std::shared_ptr<Gateway> gateway, std::optional<ModelProfile> assistant,
            WorkbenchOptions options = {});
  ~Workbench();

  Workbench(const Workbench&) = delete;
  Workbench& operator=(const Workbench&) = delete;

  // Resumes the session if it exists (the annotator must match); otherwise
  // creates it. An empty id generates one.
  SessionState StartSession(const std::string& session_id, const AnnotatorId& annotator);
  SessionState GetSession(const std::string& session_id) const;  // throws NotFound

  // nullopt at end-of-queue.
  std::optional<WorkItem> Next(const std::string& session_id) const;
  // Throws InvalidArgument unless the cursor addresses an item or the end.
  SessionState SetCursor(const std::string& session_id, SessionCursor cursor);

  // Stores the record. With a session, the annotator comes from the session
  // and the cursor advances when the record answers the current item.
  SubmitResult Submit(const std::optional<std::string>& session_id, AnnotationRecord record);

  // Latest V1 exchange for the assistant model, or one fresh call.
  AssistResult Assist(const std::string& sentence_id, const std::string& feature_id);

  Progress GetProgress() const;

  // Blocks until queued captures have finished.
  void WaitForCaptures();

  const std::vector<const Feature*>& features() const { return features_; }
  const Corpus& corpus() const { return *corpus_; }
  AnnotationStore& store() { return store_; }
  bool assistant_enabled() const { return gateway_ != nullptr && assistant_.has_value(); }

 private:
  struct CaptureTask {
    std::string sentence_id;
    std::string feature_id;
  };

  bool ValidCursor(const SessionCursor& c) const;
  SessionCursor Advance(SessionCursor c) const;
  void CaptureLoop();

  AnnotationStore& store_;
  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<Gateway> gateway_;
  std::optional<ModelProfile> assistant_;
  WorkbenchOptions options_;
  std::vector<const Feature*> features_;

  mutable std::mutex session_mu_;  // serializes cursor read-modify-write

  mutable std::mutex capture_mu_;
  std::condition_variable capture_cv_;
  std::condition_variable idle_cv_;
  std::deque<CaptureTask> captures_;
  std::size_t capture_running_ = 0;
  bool stopping_ = false;
  std::thread capture_thread_;
};

}  // namespace rhetann

#endif  // RHETANN_WORKBENCH_H_
