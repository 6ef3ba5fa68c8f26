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

#include "rhetann/agreement.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

#include "rhetann/error.h"
#include "rhetann/json_codec.h"

namespace rhetann {

std::size_t AgreementUnit::present() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

std::vector<AgreementUnit> UnitsFromMatrix(const AnnotationMatrix& matrix) {
  std::vector<AgreementUnit> units;
  for (const AnnotationRow& row : matrix.rows) {
    AgreementUnit unit{row.sentence_id, row.values};
    if (unit.present() > 0) units.push_back(std::move(unit));
  }
  return units;
}

std::string CanonicalLabel(const PropertySet& set) {
  std::string out;
  for (const std::string& p : set) {
    if (!out.empty()) out.push_back('|');
    out += p;
  }
  return out;
}

double JaccardIndex(const PropertySet& a, const PropertySet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const std::string& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::optional<double> KrippendorffAlpha(const std::vector<AgreementUnit>& units) {
  if (units.empty()) throw InvalidArgument("krippendorff alpha over an empty unit list");

  std::map<std::string, std::size_t> label_index;
  std::vector<std::vector<std::size_t>> unit_labels;
  for (const AgreementUnit& u : units) {
    std::vector<std::size_t> labels;
    for (const auto& v : u.values) {
      if (!v) continue;
      auto [it, inserted] = label_index.emplace(CanonicalLabel(*v), label_index.size());
      labels.push_back(it->second);
    }
    if (labels.size() >= 2) unit_labels.push_back(std::move(labels));
  }
  if (unit_labels.empty()) return std::nullopt;

  const std::size_t q = label_index.size();
  std::vector<double> o(q * q, 0.0);
  for (const auto& labels : unit_labels) {
    std::vector<double> count(q, 0.0);
    for (std::size_t c : labels) count[c] += 1.0;
    const double m = static_cast<double>(labels.size());
    for (std::size_t c = 0; c < q; ++c) {
      if (count[c] == 0.0) continue;
      for (std::size_t k = 0; k < q; ++k) {
        const double pairs = c == k ? count[c] * (count[c] - 1.0) : count[c] * count[k];
        o[c * q + k] += pairs / (m - 1.0);
      }
    }
  }

  std::vector<double> marginal(q, 0.0);
  double n = 0.0;
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t k = 0; k < q; ++k) marginal[c] += o[c * q + k];
    n += marginal[c];
  }
  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t k = 0; k < q; ++k) {
      if (c == k) continue;
      observed += o[c * q + k];
      expected += marginal[c] * marginal[k];
    }
  }
  if (expected == 0.0) return std::nullopt;
  return 1.0 - (n - 1.0) * observed / expected;
}

MetricResult JaccardAgreement(const std::vector<AgreementUnit>& units, JaccardMode mode) {
  if (units.empty()) throw InvalidArgument("jaccard agreement over an empty unit list");
  MetricResult result;
  double total = 0.0;
  std::size_t pooled_pairs = 0;
  for (const AgreementUnit& u : units) {
    std::vector<const PropertySet*> sets;
    for (const auto& v : u.values) {
      if (v) sets.push_back(&*v);
    }
    if (sets.size() < 2) {
      ++result.n_excluded;
      continue;
    }
    double unit_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        unit_sum += JaccardIndex(*sets[i], *sets[j]);
        ++pairs;
      }
    }
    ++result.n_units;
    if (mode == JaccardMode::kPerUnitMean) {
      total += unit_sum / static_cast<double>(pairs);
    } else {
      total += unit_sum;
      pooled_pairs += pairs;
    }
  }
  if (result.n_units == 0) return result;
  const double denom = mode == JaccardMode::kPerUnitMean
                           ? static_cast<double>(result.n_units)
                           : static_cast<double>(pooled_pairs);
  result.value = total / denom;
  return result;
}

MetricResult ExactAgreement(const std::vector<AgreementUnit>& units) {
  if (units.empty()) throw InvalidArgument("exact agreement over an empty unit list");
  MetricResult result;
  std::size_t agreed = 0;
  for (const AgreementUnit& u : units) {
    const PropertySet* first = nullptr;
    bool same = true;
    std::size_t present = 0;
    for (const auto& v : u.values) {
      if (!v) continue;
      ++present;
      if (first == nullptr) {
        first = &*v;
      } else if (*v != *first) {
        same = false;
      }
    }
    if (present < 2) {
      ++result.n_excluded;
      continue;
    }
    ++result.n_units;
    if (same) ++agreed;
  }
  if (result.n_units > 0) {
    result.value = static_cast<double>(agreed) / static_cast<double>(result.n_units);
  }
  return result;
}

AgreementReport ComputeAgreement(const Feature& feature,
                                 const std::vector<AgreementUnit>& units, JaccardMode mode) {
  AgreementReport r;
  r.feature_id = feature.id;
  r.feature_name = feature.name;
  r.n_units = units.size();
  if (units.empty()) return r;
  r.krippendorff = KrippendorffAlpha(units);
  const MetricResult j = JaccardAgreement(units, mode);
  r.jaccard = j.value;
  r.exact = ExactAgreement(units).value;
  r.n_pairable = j.n_units;
  return r;
}

std::string ConsistencyReport::column() const {
  std::string out = model;
  if (version == PromptVersion::kV2) out += "/v2";
  return out + "@" + FormatTemperature(temperature);
}

bool ExchangeConsistent(const AssistantExchange& exchange) {
  const PropertySet* first = nullptr;
  for (const LlmResponse& r : exchange.responses) {
    if (!r.parse_ok()) return false;
    if (first == nullptr) {
      first = &r.parsed->properties;
    } else if (r.parsed->properties != *first) {
      return false;
    }
  }
  return true;
}

ConsistencyReport IntraLlmConsistency(const std::vector<AssistantExchange>& exchanges,
                                      std::string_view feature_id, std::string_view model,
                                      double temperature, PromptVersion version) {
  ConsistencyReport r;
  r.feature_id = std::string(feature_id);
  r.model = std::string(model);
  r.temperature = temperature;
  r.version = version;
  std::size_t consistent = 0;
  for (const AssistantExchange& e : exchanges) {
    if (e.feature_id != feature_id || e.model != model || e.temperature != temperature ||
        e.prompt_version != version) {
      continue;
    }
    if (e.responses.size() < 2) {
      ++r.n_skipped;
      continue;
    }
    ++r.n_prompts;
    const bool all_parsed = std::all_of(e.responses.begin(), e.responses.end(),
                                        [](const LlmResponse& x) { return x.parse_ok(); });
    if (!all_parsed) r.flagged.push_back(e.id);
    if (ExchangeConsistent(e)) ++consistent;
  }
  if (r.n_prompts > 0) {
    r.exact_consistency = static_cast<double>(consistent) / static_cast<double>(r.n_prompts);
  }
  return r;
}

std::vector<ConsistencyReport> ConsistencyReports(
    const std::vector<AssistantExchange>& exchanges) {
  std::set<std::tuple<std::string, std::string, double, PromptVersion>> groups;
  for (const AssistantExchange& e : exchanges) {
    groups.emplace(e.feature_id, e.model, e.temperature, e.prompt_version);
  }
  std::vector<ConsistencyReport> out;
  for (const auto& [feature, model, temperature, version] : groups) {
    ConsistencyReport r = IntraLlmConsistency(exchanges, feature, model, temperature, version);
    if (r.n_prompts > 0) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.feature_id, a.column()) < std::make_pair(b.feature_id, b.column());
  });
  return out;
}

std::vector<AgreementReport> ComputeAgreementReports(const StoreView& view,
                                                     const Taxonomy& taxonomy,
                                                     const std::vector<std::string>& annotators,
                                                     JaccardMode mode) {
  std::vector<AgreementReport> out;
  for (const Feature& f : taxonomy.features()) {
    const std::vector<AgreementUnit> units = UnitsFromMatrix(view.Matrix(f.id, annotators));
    if (units.empty()) continue;
    out.push_back(ComputeAgreement(f, units, mode));
  }
  return out;
}

std::string FormatScore(const std::optional<double>& value) {
  if (!value) return "--";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *value);
  return buf;
}

namespace {

struct TableModel {
  std::vector<std::string> columns;
  std::vector<const AgreementReport*> rows;
  std::map<std::pair<std::string, std::string>, const ConsistencyReport*> cells;
};

TableModel BuildTable(const std::vector<AgreementReport>& reports,
                      const std::vector<ConsistencyReport>& consistency) {
  TableModel t;
  std::set<std::string> columns;
  for (const ConsistencyReport& c : consistency) {
    columns.insert(c.column());
    t.cells[{c.feature_id, c.column()}] = &c;
  }
  t.columns.assign(columns.begin(), columns.end());
  for (const AgreementReport& r : reports) t.rows.push_back(&r);
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const auto* a, const auto* b) {
    return std::tie(a->feature_name, a->feature_id) < std::tie(b->feature_name, b->feature_id);
  });
  return t;
}

}  // namespace

std::string RenderReportTable(const std::vector<AgreementReport>& reports,
                              const std::vector<ConsistencyReport>& consistency) {
  const TableModel t = BuildTable(reports, consistency);
  std::string out = "| Feature | K | J | E |";
  for (const std::string& c : t.columns) out += " " + c + " |";
  out += "\n|---|---|---|---|";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---|";
  out += "\n";
  for (const AgreementReport* r : t.rows) {
    out += "| " + r->feature_name + " | " + FormatScore(r->krippendorff) + " | " +
           FormatScore(r->jaccard) + " | " + FormatScore(r->exact) + " |";
    for (const std::string& c : t.columns) {
      auto it = t.cells.find({r->feature_id, c});
      out += " " + FormatScore(it == t.cells.end() ? std::nullopt
                                                  : it->second->exact_consistency) +
             " |";
    }
    out += "\n";
  }
  return out;
}

std::string RenderReportRecords(const std::vector<AgreementReport>& reports,
                                const std::vector<ConsistencyReport>& consistency) {
  const TableModel t = BuildTable(reports, consistency);
  auto score = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  std::string out;
  for (const AgreementReport* r : t.rows) {
    nlohmann::ordered_json j;
    j["feature_id"] = r->feature_id;
    j["feature_name"] = r->feature_name;
    j["krippendorff"] = score(r->krippendorff);
    j["jaccard"] = score(r->jaccard);
    j["exact"] = score(r->exact);
    j["n_units"] = r->n_units;
    j["n_pairable"] = r->n_pairable;
    nlohmann::ordered_json cons = nlohmann::ordered_json::object();
    for (const std::string& c : t.columns) {
      auto it = t.cells.find({r->feature_id, c});
      if (it == t.cells.end()) continue;
      cons[c] = {{"exact_consistency", score(it->second->exact_consistency)},
                 {"n_prompts", it->second->n_prompts},
                 {"flagged", it->second->flagged}};
    }
    j["consistency"] = std::move(cons);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace rhetann
