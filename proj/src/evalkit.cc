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

#include "rhetann/evalkit.h"

#include <algorithm>
#include <random>
#include <set>

#include "rhetann/error.h"
#include "rhetann/json_codec.h"
#include "rhetann/agreement.h"

namespace rhetann {

bool IsConsensus(const AnnotationRow& row) {
  if (row.values.empty()) return false;
  for (const auto& v : row.values) {
    if (!v || *v != *row.values.front()) return false;
  }
  return true;
}

ConsensusSelection SelectConsensus(const StoreView& view, std::string_view feature_id,
                                   const std::vector<std::string>& annotators,
                                   const ConsensusOptions& options) {
  if (annotators.size() < 2) throw InvalidArgument("consensus needs at least two annotators");
  ConsensusSelection sel;
  sel.feature_id = std::string(feature_id);
  std::vector<std::string> pool;
  for (const AnnotationRow& row : view.Matrix(feature_id, annotators).rows) {
    if (!IsConsensus(row)) continue;
    if (options.exclude_empty && row.values.front()->empty()) continue;
    pool.push_back(row.sentence_id);
  }
  sel.available = pool.size();
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng() % i]);
  pool.resize(std::min(pool.size(), options.k));
  std::sort(pool.begin(), pool.end());
  sel.sentence_ids = std::move(pool);
  if (sel.available < options.k) {
    sel.shortfall = "feature '" + sel.feature_id + "': " + std::to_string(sel.available) +
                    " consensus sentences available, " + std::to_string(options.k) + " requested";
  }
  return sel;
}

const char* ScoreModeName(ScoreMode m) {
  return m == ScoreMode::kExactSet ? "exact_set" : "per_property";
}

const char* AggregateModeName(AggregateMode m) {
  return m == AggregateMode::kMacro ? "macro" : "micro";
}

std::optional<double> AccuracyCell::accuracy() const {
  if (n == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(n);
}

AccuracyCell Score(const Feature& feature, const std::map<std::string, PropertySet>& predictions,
                   const std::vector<GroundTruthLabel>& gold, ScoreMode mode) {
  std::set<std::string> gold_ids;
  for (const GroundTruthLabel& g : gold) gold_ids.insert(g.sentence_id);
  std::vector<std::string> missing_pred, missing_gold;
  for (const std::string& id : gold_ids) {
    if (!predictions.count(id)) missing_pred.push_back(id);
  }
  for (const auto& [id, set] : predictions) {
    if (!gold_ids.count(id)) missing_gold.push_back(id);
  }
  if (!missing_pred.empty() || !missing_gold.empty()) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const std::string& x : v) s += (s.empty() ? "" : ",") + x;
      return s;
    };
    std::string msg = "coverage mismatch for feature '" + feature.id + "'";
    if (!missing_pred.empty()) msg += "; no prediction for: " + join(missing_pred);
    if (!missing_gold.empty()) msg += "; no gold label for: " + join(missing_gold);
    throw ValidationError(msg);
  }
  AccuracyCell cell;
  for (const GroundTruthLabel& g : gold) {
    const PropertySet& pred = predictions.at(g.sentence_id);
    if (mode == ScoreMode::kExactSet) {
      ++cell.n;
      cell.correct += pred == g.properties;
    } else {
      for (const Property& p : feature.properties) {
        ++cell.n;
        cell.correct += pred.count(p.id) == g.properties.count(p.id);
      }
    }
  }
  return cell;
}

std::optional<double> Aggregate(const std::vector<AccuracyCell>& cells, AggregateMode mode) {
  std::size_t correct = 0, n = 0, used = 0;
  double sum = 0.0;
  for (const AccuracyCell& c : cells) {
    if (c.n == 0) continue;
    correct += c.correct;
    n += c.n;
    sum += *c.accuracy();
    ++used;
  }
  if (used == 0) return std::nullopt;
  if (mode == AggregateMode::kMacro) return sum / static_cast<double>(used);
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::optional<double> AccuracyReport::Aggregate(const std::string& column,
                                                AggregateMode mode) const {
  std::vector<AccuracyCell> cells;
  for (const Row& r : rows) {
    auto it = r.cells.find(column);
    if (it != r.cells.end()) cells.push_back(it->second);
  }
  return rhetann::Aggregate(cells, mode);
}

AccuracyReport ScoreStore(const StoreView& view, const Taxonomy& taxonomy,
                          const std::vector<std::string>& feature_ids,
                          const std::vector<std::string>& human_annotators,
                          const std::vector<SystemColumn>& systems) {
  AccuracyReport report;
  for (const SystemColumn& s : systems) report.columns.push_back(s.name);
  for (const std::string& fid : feature_ids) {
    const Feature& f = taxonomy.GetFeature(fid);
    const std::vector<GroundTruthLabel> gold = view.GroundTruthFor(f.id);
    if (gold.empty()) continue;
    AccuracyReport::Row row{f.id, f.name, {}};
    std::map<std::string, const AnnotationRow*> human_rows;
    const AnnotationMatrix matrix = view.Matrix(f.id, human_annotators);
    for (const AnnotationRow& r : matrix.rows) human_rows.emplace(r.sentence_id, &r);
    for (const SystemColumn& s : systems) {
      std::map<std::string, PropertySet> predictions;
      for (const GroundTruthLabel& g : gold) {
        if (s.annotator_id.empty()) {
          auto it = human_rows.find(g.sentence_id);
          if (it != human_rows.end() && IsConsensus(*it->second)) {
            predictions.emplace(g.sentence_id, *it->second->values.front());
          }
        } else if (auto rec = view.Latest(g.sentence_id, s.annotator_id, f.id)) {
          predictions.emplace(g.sentence_id, rec->properties);
        }
      }
      row.cells[s.name] = Score(f, predictions, gold, s.mode);
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.feature_name, a.feature_id) < std::tie(b.feature_name, b.feature_id);
  });
  return report;
}

std::vector<SystemColumn> DefaultSystems(const StoreView& view) {
  std::vector<SystemColumn> out = {{"Human", "", ScoreMode::kExactSet}};
  for (const AnnotatorId& a : view.Annotators()) {
    if (a.kind != AnnotatorKind::kLlm) continue;
    const bool v2 = a.id.find(":v2:") != std::string::npos;
    out.push_back({a.id, a.id, v2 ? ScoreMode::kPerProperty : ScoreMode::kExactSet});
  }
  return out;
}

std::string RenderAccuracyTable(const AccuracyReport& report) {
  std::string out = "| Feature |";
  for (const std::string& c : report.columns) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < report.columns.size(); ++i) out += "---|";
  out += "\n";
  auto cell = [](const std::optional<double>& v, std::optional<std::size_t> n) {
    std::string s = FormatScore(v);
    if (n) s += " (n=" + std::to_string(*n) + ")";
    return s;
  };
  for (const AccuracyReport::Row& r : report.rows) {
    out += "| " + r.feature_name + " |";
    for (const std::string& c : report.columns) {
      auto it = r.cells.find(c);
      out += " " +
             (it == r.cells.end() ? std::string("--") : cell(it->second.accuracy(), it->second.n)) +
             " |";
    }
    out += "\n";
  }
  for (AggregateMode mode : {AggregateMode::kMicro, AggregateMode::kMacro}) {
    out += std::string("| All features (") + AggregateModeName(mode) + ") |";
    for (const std::string& c : report.columns) {
      out += " " + cell(report.Aggregate(c, mode), std::nullopt) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string RenderAccuracyRecords(const AccuracyReport& report) {
  auto score = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  std::string out;
  for (const AccuracyReport::Row& r : report.rows) {
    nlohmann::ordered_json j;
    j["feature_id"] = r.feature_id;
    j["feature_name"] = r.feature_name;
    nlohmann::ordered_json cells = nlohmann::ordered_json::object();
    for (const std::string& c : report.columns) {
      auto it = r.cells.find(c);
      if (it == r.cells.end()) continue;
      cells[c] = {{"accuracy", score(it->second.accuracy())},
                  {"correct", it->second.correct},
                  {"n", it->second.n}};
    }
    j["cells"] = std::move(cells);
    out += j.dump() + "\n";
  }
  nlohmann::ordered_json all;
  all["feature_id"] = "all";
  for (AggregateMode mode : {AggregateMode::kMicro, AggregateMode::kMacro}) {
    nlohmann::ordered_json agg = nlohmann::ordered_json::object();
    for (const std::string& c : report.columns) agg[c] = score(report.Aggregate(c, mode));
    all[AggregateModeName(mode)] = std::move(agg);
  }
  out += all.dump() + "\n";
  return out;
}

std::map<ErrorCategory, std::size_t> SummarizeErrors(const StoreView& view,
                                                     const ErrorScope& scope) {
  std::map<ErrorCategory, std::size_t> out;
  for (ErrorCategory c : kAllErrorCategories) out[c] = 0;
  for (const ErrorTag& t : view.ErrorTags()) {
    if (scope.feature_id || scope.model) {
      const AssistantExchange* e = view.FindExchange(t.exchange_id);
      if (e == nullptr) continue;
      if (scope.feature_id && e->feature_id != *scope.feature_id) continue;
      if (scope.model && e->model != *scope.model) continue;
    }
    ++out[t.category];
  }
  return out;
}

std::string RenderErrorSummary(const std::map<ErrorCategory, std::size_t>& summary) {
  std::string out = "| Category | Count |\n|---|---|\n";
  std::size_t total = 0;
  for (const auto& [c, n] : summary) {
    out += std::string("| ") + ErrorCategoryName(c) + " | " + std::to_string(n) + " |\n";
    total += n;
  }
  out += "| total | " + std::to_string(total) + " |\n";
  return out;
}

}  // namespace rhetann
