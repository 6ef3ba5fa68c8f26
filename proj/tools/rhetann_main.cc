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

// rhetann: command-line entry point for corpus checks, LLM campaigns,
// agreement and accuracy reports, fine-tune datasets, cost estimates and the
// annotation server.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 transport exhaustion.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rhetann/agreement.h"
#include "rhetann/annotation_store.h"
#include "rhetann/campaign.h"
#include "rhetann/config.h"
#include "rhetann/corpus.h"
#include "rhetann/cost.h"
#include "rhetann/error.h"
#include "rhetann/evalkit.h"
#include "rhetann/finetune.h"
#include "rhetann/gateway.h"
#include "rhetann/json_codec.h"
#include "rhetann/prompt.h"
#include "rhetann/server.h"
#include "rhetann/taxonomy.h"
#include "rhetann/workbench.h"

namespace rhetann {
namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

struct Globals {
  std::string config_path;
  std::string store_path = "rhetann.store.jsonl";
  std::string taxonomy_path;
  std::string corpus_path;
};

std::vector<std::string> SplitCsv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void Emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    WriteFile(out_path, text);
  }
}

class Context {
 public:
  explicit Context(const Globals& g) : g_(g) {}

  std::shared_ptr<const Taxonomy> taxonomy() {
    if (!taxonomy_) {
      taxonomy_ = g_.taxonomy_path.empty()
                      ? std::make_shared<const Taxonomy>(ShippedTaxonomy())
                      : std::make_shared<const Taxonomy>(LoadTaxonomyFile(g_.taxonomy_path));
    }
    return taxonomy_;
  }

  std::shared_ptr<const Corpus> corpus(bool required) {
    if (!corpus_ && !g_.corpus_path.empty()) {
      CorpusLoadResult r = LoadCorpusFile(g_.corpus_path);
      for (const CorpusDiagnostic& d : r.diagnostics) {
        if (d.severity == CorpusDiagnostic::Severity::kError) {
          throw DataError(g_.corpus_path + ":" + std::to_string(d.line) + ": " + d.message);
        }
      }
      corpus_ = std::make_shared<const Corpus>(std::move(r.corpus));
    }
    if (!corpus_ && required) throw InvalidArgument("this command needs --corpus");
    return corpus_;
  }

  AnnotationStore& store() {
    if (!store_) {
      store_ = AnnotationStore::Open(g_.store_path, taxonomy(), corpus(false));
      for (const std::string& w : store_->replay_warnings()) {
        std::cerr << "warning: " << g_.store_path << ": " << w << "\n";
      }
    }
    return *store_;
  }

  const Config& config() {
    if (!config_) {
      config_ = g_.config_path.empty() ? std::make_unique<Config>()
                                       : std::make_unique<Config>(LoadConfigFile(g_.config_path));
    }
    return *config_;
  }

  std::shared_ptr<Gateway> gateway() {
    if (!gateway_) {
      gateway_ = std::make_shared<Gateway>(MakeTransport(config(), taxonomy()), taxonomy(),
                                           config().concurrency);
      AnnotationStore* s = &store();
      gateway_->set_ledger_sink([s](const UsageLedgerEntry& e) { s->AppendUsage(e); });
    }
    return gateway_;
  }

  std::vector<std::string> HumanAnnotators() {
    std::vector<std::string> out;
    for (const AnnotatorId& a : store().Snapshot()->Annotators()) {
      if (a.kind == AnnotatorKind::kHuman) out.push_back(a.id);
    }
    return out;
  }

 private:
  const Globals& g_;
  std::shared_ptr<const Taxonomy> taxonomy_;
  std::shared_ptr<const Corpus> corpus_;
  std::unique_ptr<AnnotationStore> store_;
  std::unique_ptr<Config> config_;
  std::shared_ptr<Gateway> gateway_;
};

AnnotationServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server != nullptr) g_server->Stop();
}

int Main(int argc, char** argv) {
  CLI::App app{"rhetann: rhetorical feature annotation toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Gateway/server config (JSON)");
  app.add_option("--store", g.store_path, "Append-only store file")->capture_default_str();
  app.add_option("--taxonomy", g.taxonomy_path, "Taxonomy YAML (default: shipped)");
  app.add_option("--corpus", g.corpus_path, "Corpus JSONL");

  std::function<int()> action;
  Context ctx(g);

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Corpus tools")->require_subcommand(1);
  std::string validate_file;
  auto* validate = corpus_cmd->add_subcommand("validate", "Check a corpus file");
  validate->add_option("file", validate_file)->required();
  validate->callback([&] {
    action = [&] {
      const CorpusLoadResult r = LoadCorpusFile(validate_file);
      for (const CorpusDiagnostic& d : r.diagnostics) {
        std::cout << validate_file << ":" << d.line << ": "
                  << (d.severity == CorpusDiagnostic::Severity::kError ? "error" : "warning")
                  << (d.sentence_id.empty() ? "" : " [" + d.sentence_id + "]") << ": "
                  << d.message << "\n";
      }
      std::cout << r.corpus.size() << " sentences, " << r.diagnostics.size() << " diagnostics\n";
      return r.ok() ? 0 : kExitData;
    };
  });

  // store
  auto* store_cmd = app.add_subcommand("store", "Store maintenance")->require_subcommand(1);
  std::string export_out, import_file;
  auto* exp = store_cmd->add_subcommand("export", "Write the canonical export");
  exp->add_option("--out", export_out);
  exp->callback([&] {
    action = [&] {
      Emit(export_out, ctx.store().Export());
      return 0;
    };
  });
  auto* imp = store_cmd->add_subcommand("import", "Load a canonical export into an empty store");
  imp->add_option("file", import_file)->required();
  imp->callback([&] {
    action = [&] {
      ctx.store().Import(ReadFile(import_file));
      std::cout << "imported " << ctx.store().Snapshot()->record_count() << " records\n";
      return 0;
    };
  });
  auto* compact = store_cmd->add_subcommand("compact", "Drop superseded session states");
  compact->callback([&] {
    action = [&] {
      const std::size_t before = ctx.store().Snapshot()->record_count();
      ctx.store().Compact();
      std::cout << before << " -> " << ctx.store().Snapshot()->record_count() << " records\n";
      return 0;
    };
  });

  // prompt
  auto* prompt_cmd = app.add_subcommand("prompt", "Prompt tools")->require_subcommand(1);
  std::string render_version = "v1", render_feature, render_property, sentence_file, sentence_text;
  bool render_json = false;
  auto* render = prompt_cmd->add_subcommand("render", "Print the message pair for a prompt");
  render->add_option("--version", render_version)->check(CLI::IsMember({"v1", "v2"}));
  render->add_option("--feature", render_feature)->required();
  render->add_option("--property", render_property);
  auto* sf = render->add_option("--sentence-file", sentence_file);
  auto* st = render->add_option("--sentence", sentence_text);
  sf->excludes(st);
  render->add_flag("--json", render_json, "Emit the PromptSpec as JSON");
  render->callback([&] {
    action = [&] {
      std::string sentence = sentence_text;
      if (!sentence_file.empty()) {
        sentence = ReadFile(sentence_file);
        while (!sentence.empty() && (sentence.back() == '\n' || sentence.back() == '\r')) {
          sentence.pop_back();
        }
      }
      if (sentence.empty()) throw InvalidArgument("give --sentence or --sentence-file");
      const Taxonomy& t = *ctx.taxonomy();
      std::vector<PromptSpec> specs;
      if (render_version == "v1") {
        specs.push_back(BuildV1(t, render_feature, sentence));
      } else if (!render_property.empty()) {
        specs.push_back(BuildV2(t, render_feature, render_property, sentence));
      } else {
        specs = BuildV2All(t, render_feature, sentence);
      }
      for (const PromptSpec& s : specs) {
        if (render_json) {
          std::cout << ToJson(s).dump() << "\n";
        } else {
          std::cout << "SYSTEM:\n" << s.system_text << "\nUSER:\n" << s.user_text << "\n";
        }
      }
      return 0;
    };
  });

  // campaign
  auto* campaign_cmd = app.add_subcommand("campaign", "LLM annotation campaigns")->require_subcommand(1);
  std::string c_version = "v1", c_model, c_features, c_sentences;
  double c_temperature = 0.0;
  int c_repetitions = 1, c_retries = 3;
  std::size_t c_max = 0;
  auto* run = campaign_cmd->add_subcommand("run", "Issue every unanswered prompt of the grid");
  run->add_option("--version", c_version)->check(CLI::IsMember({"v1", "v2"}));
  run->add_option("--model", c_model)->required();
  run->add_option("--temperature", c_temperature)->check(CLI::NonNegativeNumber);
  run->add_option("--repetitions", c_repetitions)->check(CLI::PositiveNumber);
  run->add_option("--max-retries", c_retries)->check(CLI::NonNegativeNumber);
  run->add_option("--features", c_features, "Comma-separated feature ids (default: all manual)");
  run->add_option("--sentences", c_sentences, "Comma-separated sentence ids (default: all)");
  run->add_option("--max-prompts", c_max, "Stop after this many prompts");
  run->callback([&] {
    action = [&] {
      const Corpus& corpus = *ctx.corpus(true);
      CampaignSpec spec;
      spec.version = *ParsePromptVersion(c_version);
      spec.feature_ids = SplitCsv(c_features);
      spec.sentence_ids = SplitCsv(c_sentences);
      spec.policy.temperature = c_temperature;
      spec.policy.repetitions = c_repetitions;
      spec.policy.max_retries = c_retries;
      spec.max_prompts = c_max;
      const ModelProfile& model = ctx.config().Model(c_model);
      const CampaignSummary s = RunCampaign(ctx.store(), corpus, *ctx.gateway(), model, spec);
      std::cout << RenderCampaignSummary(s);
      std::cout << "cost " << ctx.gateway()->TotalCost().ToString() << "\n";
      if (!s.failures.empty() && s.answered == 0) return kExitTransport;
      return 0;
    };
  });

  // agree
  auto* agree_cmd = app.add_subcommand("agree", "Agreement reports")->require_subcommand(1);
  std::string a_annotators, a_out, a_jaccard = "unit";
  auto* compute = agree_cmd->add_subcommand("compute", "K/J/E plus LLM consistency per feature");
  compute->add_option("--annotators", a_annotators, "Comma-separated (default: all humans)");
  compute->add_option("--out", a_out, "report.table or report.records (default: table on stdout)");
  compute->add_option("--jaccard", a_jaccard)->check(CLI::IsMember({"unit", "pooled"}));
  compute->callback([&] {
    action = [&] {
      std::vector<std::string> annotators = SplitCsv(a_annotators);
      if (annotators.empty()) annotators = ctx.HumanAnnotators();
      const auto view = ctx.store().Snapshot();
      const auto reports = ComputeAgreementReports(
          *view, *ctx.taxonomy(), annotators,
          a_jaccard == "pooled" ? JaccardMode::kPooledPairs : JaccardMode::kPerUnitMean);
      const auto consistency = ConsistencyReports(view->Exchanges());
      Emit(a_out, EndsWith(a_out, ".records") ? RenderReportRecords(reports, consistency)
                                              : RenderReportTable(reports, consistency));
      return 0;
    };
  });

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Ground truth and accuracy")->require_subcommand(1);
  std::string e_feature, e_annotators, e_out, e_features;
  std::size_t e_k = 30;
  std::uint64_t e_seed = 0;
  bool e_exclude_empty = false;
  auto* consensus = eval_cmd->add_subcommand("consensus", "Sample unanimous sentences");
  consensus->add_option("--feature", e_feature)->required();
  consensus->add_option("--annotators", e_annotators);
  consensus->add_option("--k", e_k);
  consensus->add_option("--seed", e_seed);
  consensus->add_flag("--exclude-empty", e_exclude_empty);
  consensus->add_option("--out", e_out);
  consensus->callback([&] {
    action = [&] {
      std::vector<std::string> annotators = SplitCsv(e_annotators);
      if (annotators.empty()) annotators = ctx.HumanAnnotators();
      const ConsensusSelection sel = SelectConsensus(*ctx.store().Snapshot(), e_feature,
                                                     annotators, {e_k, e_seed, e_exclude_empty});
      std::string text;
      for (const std::string& id : sel.sentence_ids) text += id + "\n";
      Emit(e_out, text);
      if (sel.shortfall) std::cerr << "note: " << *sel.shortfall << "\n";
      return 0;
    };
  });

  auto* score = eval_cmd->add_subcommand("score", "Accuracy against ground truth");
  score->add_option("--features", e_features, "Comma-separated (default: all)");
  score->add_option("--annotators", e_annotators, "Human annotators for the consensus column");
  score->add_option("--out", e_out, ".table or .records");
  score->callback([&] {
    action = [&] {
      std::vector<std::string> features = SplitCsv(e_features);
      if (features.empty()) {
        for (const Feature& f : ctx.taxonomy()->features()) features.push_back(f.id);
      }
      std::vector<std::string> annotators = SplitCsv(e_annotators);
      if (annotators.empty()) annotators = ctx.HumanAnnotators();
      const auto view = ctx.store().Snapshot();
      const AccuracyReport r =
          ScoreStore(*view, *ctx.taxonomy(), features, annotators, DefaultSystems(*view));
      Emit(e_out, EndsWith(e_out, ".records") ? RenderAccuracyRecords(r) : RenderAccuracyTable(r));
      return 0;
    };
  });

  auto* errors_cmd = eval_cmd->add_subcommand("errors", "LLM error taxonomy")->require_subcommand(1);
  std::string t_exchange, t_category, t_rationale, t_tagger, s_feature, s_model;
  auto* tag = errors_cmd->add_subcommand("tag", "Tag a stored exchange");
  tag->add_option("--exchange", t_exchange)->required();
  tag->add_option("--category", t_category)->required();
  tag->add_option("--rationale", t_rationale);
  tag->add_option("--tagger", t_tagger)->required();
  tag->callback([&] {
    action = [&] {
      ctx.store().AppendErrorTag(
          {t_exchange, ParseErrorCategory(t_category), t_rationale, t_tagger, SystemNow()});
      return 0;
    };
  });
  auto* summarize = errors_cmd->add_subcommand("summarize", "Counts per category");
  summarize->add_option("--feature", s_feature);
  summarize->add_option("--model", s_model);
  summarize->callback([&] {
    action = [&] {
      ErrorScope scope;
      if (!s_feature.empty()) scope.feature_id = s_feature;
      if (!s_model.empty()) scope.model = s_model;
      std::cout << RenderErrorSummary(SummarizeErrors(*ctx.store().Snapshot(), scope));
      return 0;
    };
  });

  auto* gt_cmd = eval_cmd->add_subcommand("gt", "Ground-truth labels")->require_subcommand(1);
  std::string gt_sentence, gt_feature, gt_properties, gt_author, gt_notes;
  auto* gt_add = gt_cmd->add_subcommand("add", "Store a ground-truth label");
  gt_add->add_option("--sentence", gt_sentence)->required();
  gt_add->add_option("--feature", gt_feature)->required();
  gt_add->add_option("--properties", gt_properties, "Comma-separated; empty means none apply");
  gt_add->add_option("--author", gt_author)->required();
  gt_add->add_option("--notes", gt_notes);
  gt_add->callback([&] {
    action = [&] {
      const std::vector<std::string> props = SplitCsv(gt_properties);
      ctx.store().PutGroundTruth({gt_sentence, gt_feature, PropertySet(props.begin(), props.end()),
                                  gt_author, gt_notes, SystemNow()});
      return 0;
    };
  });

  // finetune
  auto* ft_cmd = app.add_subcommand("finetune", "Fine-tuning datasets")->require_subcommand(1);
  std::string f_kind = "large", f_feature, f_out = ".", f_annotators, f_exclude;
  std::uint64_t f_seed = 0;
  bool f_downsample = false;
  auto* build = ft_cmd->add_subcommand("build", "Build and emit a dataset with its manifest");
  build->add_option("--kind", f_kind)->check(CLI::IsMember({"small", "medium", "large"}));
  build->add_option("--feature", f_feature)->required();
  build->add_option("--seed", f_seed);
  build->add_option("--out", f_out, "Output directory");
  build->add_option("--annotators", f_annotators, "Human annotators (default: all)");
  build->add_option("--exclude", f_exclude, "File of sentence ids to exclude, one per line");
  build->add_flag("--downsample-negatives", f_downsample);
  build->callback([&] {
    action = [&] {
      BuildOptions opts;
      opts.seed = f_seed;
      opts.annotators = SplitCsv(f_annotators);
      opts.downsample_negatives = f_downsample;
      if (!f_exclude.empty()) {
        std::stringstream in(ReadFile(f_exclude));
        for (std::string line; std::getline(in, line);) {
          if (!line.empty()) opts.exclusions.insert(line);
        }
      }
      const Dataset d = BuildDataset(*ParseDatasetKind(f_kind), *ctx.store().Snapshot(),
                                     *ctx.taxonomy(), *ctx.corpus(true), f_feature, opts);
      for (const std::string& w : d.warnings) std::cerr << "warning: " << w << "\n";
      if (d.examples.empty()) {
        throw DataError("no training examples for feature '" + f_feature + "'");
      }
      const EmitResult r = Emit(d, f_seed);
      const auto [data, manifest] = WriteDataset(f_out, r);
      std::cout << data << " (" << r.manifest.line_count << " lines, " << r.manifest.digest
                << ")\n" << manifest << "\n";
      return 0;
    };
  });

  // cost
  auto* cost_cmd = app.add_subcommand("cost", "Cost estimates")->require_subcommand(1);
  std::string plan_file;
  auto* estimate = cost_cmd->add_subcommand("estimate", "Itemized cost of a plan");
  estimate->add_option("--plan", plan_file)->required();
  estimate->callback([&] {
    action = [&] {
      const PlanDocument doc = ParsePlan(ReadFile(plan_file), ctx.config().human_price_per_sentence);
      std::cout << RenderEstimate(doc.human ? EstimateHumanCost(doc.people)
                                            : EstimateCost(doc.llm, ctx.config().models));
      return 0;
    };
  });

  // serve
  std::string host;
  int port = -1;
  bool capture = false;
  auto* serve = app.add_subcommand("serve", "Run the annotation server");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_flag("--assistant-capture", capture, "Request a V1 exchange on every submission");
  serve->callback([&] {
    action = [&] {
      const Config& cfg = ctx.config();
      std::optional<ModelProfile> assistant;
      std::shared_ptr<Gateway> gateway;
      if (!cfg.models.empty()) {
        assistant = cfg.server.assistant_model.empty() ? cfg.models.front()
                                                       : cfg.Model(cfg.server.assistant_model);
        gateway = ctx.gateway();
      }
      WorkbenchOptions opts;
      opts.assistant_capture = capture || cfg.server.assistant_capture;
      opts.assistant_temperature = cfg.server.assistant_temperature;
      Workbench wb(ctx.store(), ctx.corpus(true), gateway, assistant, opts);
      AnnotationServer server(wb);
      g_server = &server;
      std::signal(SIGINT, HandleSignal);
      std::signal(SIGTERM, HandleSignal);
      const std::string h = host.empty() ? cfg.server.host : host;
      const int p = port < 0 ? cfg.server.port : port;
      std::cerr << "serving on " << h << ":" << p << "\n";
      server.Run(h, p);
      g_server = nullptr;
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kInvalidArgument:
        return kExitUsage;
      case ErrorCode::kTransport:
      case ErrorCode::kAuth:
        return kExitTransport;
      default:
        return kExitData;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace
}  // namespace rhetann

int main(int argc, char** argv) { return rhetann::Main(argc, argv); }
