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

#ifndef RHETANN_SERVER_H_
#define RHETANN_SERVER_H_

#include <memory>
#include <string>
#include <thread>

#include "rhetann/workbench.h"

namespace httplib {
class Server;
}

namespace rhetann {

// HTTP/JSON shell over a Workbench.
//
//   GET  /taxonomy                  full taxonomy, ETag-versioned
//   POST /sessions                  {"annotator", "session_id"?} -> session
//   GET  /sessions/{id}             session state
//   GET  /sessions/{id}/next        next work item; 204 at end of queue
//   POST /sessions/{id}/cursor      {"sentence_index", "feature_index"}
//   POST /annotations               record -> {"revision", ...}; 422 on validation
//   GET|POST /assist                {"sentence_id", "feature_id"} -> advisory suggestion
//   GET  /progress                  record counts per annotator and feature
//   GET  /reports/agreement         ?annotators=a,b&format=table|records
//
// Errors are {"error": {"code", "message"}} with a status derived from the
// error class.
class AnnotationServer {
 public:
  explicit AnnotationServer(Workbench& workbench);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  // Returns the bound port; throws InvalidArgument if binding fails.
  int Start(const std::string& host, int port);
  // Serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

  int port() const { return port_; }

 private:
  void Routes();

  Workbench& workbench_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = 0;
  std::string taxonomy_body_;
  std::string taxonomy_etag_;
};

}  // namespace rhetann

#endif  // RHETANN_SERVER_H_
