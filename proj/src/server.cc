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

#include "rhetann/server.h"

#include <sstream>

#include "httplib.h"
#include "rhetann/agreement.h"
#include "rhetann/digest.h"
#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

namespace {

constexpr const char* kJson = "application/json";

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kValidation:
    case ErrorCode::kContextOverflow:
      return 422;
    case ErrorCode::kTransport:
    case ErrorCode::kAuth:
      return 503;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kData:
      return 400;
  }
  return 500;
}

void SendError(httplib::Response& res, int status, const std::string& code,
               const std::string& message) {
  res.status = status;
  res.set_content(Json{{"error", {{"code", code}, {"message", message}}}}.dump(), kJson);
  if (status == 503) res.set_header("Retry-After", "1");
}

template <typename Fn>
httplib::Server::Handler Guard(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      SendError(res, StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
    } catch (const Json::exception& e) {
      SendError(res, 400, "data", std::string("malformed request body: ") + e.what());
    } catch (const std::exception& e) {
      SendError(res, 500, "internal", e.what());
    }
  };
}

Json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body);
  if (!j.is_object()) throw InvalidArgument("request body must be a JSON object");
  return j;
}

void SendJson(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

Json WorkItemJson(const WorkItem& item) {
  const Sentence& s = *item.sentence;
  return Json{{"end_of_queue", false},
              {"cursor",
               {{"sentence_index", item.cursor.sentence_index},
                {"feature_index", item.cursor.feature_index}}},
              {"sentence", {{"id", s.id}, {"text", s.text}, {"tokens", s.tree.tokens()}}},
              {"tree", TreeToJson(s.tree.root())},
              {"feature", ToJson(*item.feature)},
              {"existing", item.existing ? ToJson(*item.existing) : Json(nullptr)}};
}

// Record fields from a submission body. Absent annotator means the session's.
AnnotationRecord RecordFromBody(const Json& j) {
  AnnotationRecord r;
  try {
    r.sentence_id = j.at("sentence_id").get<std::string>();
    r.feature_id = j.at("feature_id").get<std::string>();
    for (const Json& p : j.at("properties")) r.properties.insert(p.get<std::string>());
    if (auto it = j.find("node_path"); it != j.end() && !it->is_null()) {
      r.node_path = NodePathFromJson(*it);
    }
    if (auto it = j.find("annotator"); it != j.end()) {
      r.annotator = it->is_string() ? AnnotatorId{it->get<std::string>(), AnnotatorKind::kHuman}
                                    : AnnotatorIdFromJson(*it);
    }
    if (auto it = j.find("timestamp"); it != j.end()) {
      r.timestamp = ParseTimestamp(it->get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("annotation body: ") + e.what());
  } catch (const Error& e) {
    throw ValidationError(std::string("annotation body: ") + e.what());
  }
  return r;
}

Json AssistJson(const AssistResult& a, const Taxonomy& taxonomy) {
  const AssistantExchange& e = a.exchange;
  Json j{{"advisory", true},
         {"cached", a.cached},
         {"exchange_id", e.id},
         {"sentence_id", e.sentence_id},
         {"feature_id", e.feature_id},
         {"model", e.model},
         {"temperature", e.temperature}};
  const LlmResponse& r = e.responses.front();
  Json violations = Json::array();
  for (Violation v : r.violations) violations.push_back(ViolationName(v));
  j["parse_ok"] = r.parse_ok();
  j["violations"] = violations;
  j["raw"] = r.raw;
  Json props = Json::array();
  if (r.parsed) {
    const Feature& f = taxonomy.GetFeature(e.feature_id);
    for (const Property& p : f.properties) {
      if (r.parsed->properties.count(p.id)) props.push_back(p.id);
    }
  }
  j["properties"] = props;
  j["explanation"] = r.parsed ? r.parsed->explanation : "";
  return j;
}

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

AnnotationServer::AnnotationServer(Workbench& workbench)
    : workbench_(workbench), http_(std::make_unique<httplib::Server>()) {
  // Responses go out as header and body writes; without this, Nagle plus
  // delayed ACK adds ~40ms to keep-alive requests.
  http_->set_tcp_nodelay(true);
  taxonomy_body_ = ToJson(workbench_.store().taxonomy()).dump();
  taxonomy_etag_ = "\"" + workbench_.store().taxonomy().version() + "-" +
                   Sha256Digest(taxonomy_body_).substr(7, 16) + "\"";
  Routes();
}

AnnotationServer::~AnnotationServer() { Stop(); }

void AnnotationServer::Routes() {
  httplib::Server& s = *http_;
  Workbench& wb = workbench_;

  s.Get("/taxonomy", Guard([this](const httplib::Request& req, httplib::Response& res) {
    res.set_header("ETag", taxonomy_etag_);
    res.set_header("Cache-Control", "public, max-age=0, must-revalidate");
    if (req.get_header_value("If-None-Match") == taxonomy_etag_) {
      res.status = 304;
      return;
    }
    res.set_content(taxonomy_body_, kJson);
  }));

  s.Post("/sessions", Guard([&wb](const httplib::Request& req, httplib::Response& res) {
    const Json body = ParseBody(req);
    AnnotatorId annotator;
    const Json& a = body.at("annotator");
    annotator = a.is_string() ? AnnotatorId{a.get<std::string>(), AnnotatorKind::kHuman}
                              : AnnotatorIdFromJson(a);
    const std::string id = body.value("session_id", "");
    const bool existed = !id.empty() && wb.store().Session(id).has_value();
    SendJson(res, ToJson(wb.StartSession(id, annotator)), existed ? 200 : 201);
  }));

  s.Get(R"(/sessions/([^/]+))", Guard([&wb](const httplib::Request& req, httplib::Response& res) {
    SendJson(res, ToJson(wb.GetSession(req.matches[1])));
  }));

  s.Get(R"(/sessions/([^/]+)/next)",
        Guard([&wb](const httplib::Request& req, httplib::Response& res) {
          auto item = wb.Next(req.matches[1]);
          if (!item) {
            res.status = 204;
            return;
          }
          SendJson(res, WorkItemJson(*item));
        }));

  s.Post(R"(/sessions/([^/]+)/cursor)",
         Guard([&wb](const httplib::Request& req, httplib::Response& res) {
           const Json body = ParseBody(req);
           SessionCursor c{body.at("sentence_index").get<std::size_t>(),
                           body.at("feature_index").get<std::size_t>()};
           SendJson(res, ToJson(wb.SetCursor(req.matches[1], c)));
         }));

  s.Post("/annotations", Guard([&wb](const httplib::Request& req, httplib::Response& res) {
    const Json body = ParseBody(req);
    std::optional<std::string> session;
    if (auto it = body.find("session_id"); it != body.end() && !it->is_null()) {
      session = it->get<std::string>();
    }
    AnnotationRecord record = RecordFromBody(body);
    if (!session && record.annotator.id.empty()) {
      throw ValidationError("annotation needs a session_id or an annotator");
    }
    const SubmitResult r = wb.Submit(session, std::move(record));
    Json out{{"revision", r.revision}, {"capture_queued", r.capture_queued}};
    if (r.cursor) {
      out["cursor"] = {{"sentence_index", r.cursor->sentence_index},
                       {"feature_index", r.cursor->feature_index}};
    }
    SendJson(res, out, 201);
  }));

  auto assist = Guard([&wb](const httplib::Request& req, httplib::Response& res) {
    std::string sentence_id = req.get_param_value("sentence_id");
    std::string feature_id = req.get_param_value("feature_id");
    if (req.method == "POST") {
      const Json body = ParseBody(req);
      sentence_id = body.value("sentence_id", sentence_id);
      feature_id = body.value("feature_id", feature_id);
    }
    if (sentence_id.empty() || feature_id.empty()) {
      throw InvalidArgument("assist needs sentence_id and feature_id");
    }
    SendJson(res, AssistJson(wb.Assist(sentence_id, feature_id), wb.store().taxonomy()));
  });
  s.Get("/assist", assist);
  s.Post("/assist", assist);

  s.Get("/progress", Guard([&wb](const httplib::Request&, httplib::Response& res) {
    const Progress p = wb.GetProgress();
    Json by = Json::object();
    for (const auto& [annotator, features] : p.by_annotator) by[annotator] = features;
    SendJson(res, Json{{"annotators", by},
                       {"total_records", p.total_records},
                       {"pending_captures", p.pending_captures},
                       {"sentences", wb.corpus().size()},
                       {"features", wb.features().size()}});
  }));

  s.Get("/reports/agreement", Guard([&wb](const httplib::Request& req, httplib::Response& res) {
    const auto view = wb.store().Snapshot();
    std::vector<std::string> annotators = SplitCsv(req.get_param_value("annotators"));
    if (annotators.empty()) {
      for (const AnnotatorId& a : view->Annotators()) {
        if (a.kind == AnnotatorKind::kHuman) annotators.push_back(a.id);
      }
    }
    const JaccardMode mode = req.get_param_value("jaccard") == "pooled"
                                 ? JaccardMode::kPooledPairs
                                 : JaccardMode::kPerUnitMean;
    const auto reports = ComputeAgreementReports(*view, wb.store().taxonomy(), annotators, mode);
    const auto consistency = ConsistencyReports(view->Exchanges());
    if (req.get_param_value("format") == "records") {
      res.set_content(RenderReportRecords(reports, consistency), "application/x-ndjson");
    } else {
      res.set_content(RenderReportTable(reports, consistency), "text/plain; charset=utf-8");
    }
  }));

  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      SendError(res, 404, "not_found", "no route for " + req.method + " " + req.path);
    }
  });
}

int AnnotationServer::Start(const std::string& host, int port) {
  port_ = port == 0 ? http_->bind_to_any_port(host) : (http_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return port_;
}

void AnnotationServer::Run(const std::string& host, int port) {
  if (!http_->bind_to_port(host, port)) {
    throw InvalidArgument("cannot bind " + host + ":" + std::to_string(port));
  }
  port_ = port;
  http_->listen_after_bind();
}

void AnnotationServer::Stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rhetann
