// Copyright 2026 The tcsaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tcsaug/cli.h"

#include <cstdio>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"
#include "tcsaug/annotate.h"
#include "tcsaug/augment.h"
#include "tcsaug/config.h"
#include "tcsaug/corpus.h"
#include "tcsaug/embed.h"
#include "tcsaug/eval.h"
#include "tcsaug/io.h"
#include "tcsaug/wikifier.h"

namespace tcsaug {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {}

  void Event(const std::string& event, ordered_json fields = {}) {
    ordered_json record;
    record["level"] = "info";
    record["event"] = event;
    if (fields.is_object()) {
      for (auto& [key, value] : fields.items()) record[key] = value;
    }
    err_ << record.dump() << "\n";
  }

  void Artifact(const std::string& role, const fs::path& path) {
    Event("artifact", {{"role", role},
                       {"path", path.string()},
                       {"sha256", Sha256Hex(ReadFile(path))}});
  }

 private:
  std::ostream& err_;
};

struct GlobalFlags {
  std::string config_path = "tcsaug.json";
  std::optional<size_t> workers;
  std::optional<uint64_t> seed;
};

struct AugmentFlags {
  std::optional<int> multiplier;
  bool xx = false;
  bool baseline = false;
  std::optional<std::string> separator;
  std::optional<std::string> output;
};

struct EvalFlags {
  std::optional<std::string> model_outputs;
  std::optional<std::string> manifest;
  std::optional<std::string> external_scores;
  std::optional<std::string> alternative;
  std::optional<std::string> output;
};

struct ReportFlags {
  std::vector<std::string> reports;
  std::optional<std::string> output;
};

PipelineConfig LoadWithOverrides(const GlobalFlags& flags) {
  PipelineConfig config = LoadConfig(flags.config_path);
  if (flags.workers) {
    if (*flags.workers == 0) {
      throw Error(ErrorCode::kConfig, "--workers must be >= 1");
    }
    config.workers = *flags.workers;
  }
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

std::string DatasetName(const DatasetConfig& c) {
  if (c.baseline) return "baseline";
  return "tcs" + std::to_string(c.multiplier) + "x" + (c.xx ? "x" : "") +
         "_seed" + std::to_string(c.seed);
}

std::string ModelLabel(const nlohmann::json& config) {
  if (!config.contains("multiplier")) return "model";
  if (config.value("baseline", false)) return "Baseline";
  return "TCS" + std::to_string(config.value("multiplier", 1)) + "X" +
         (config.value("xx", false) ? "X" : "");
}

std::string Fixed(double value, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << value;
  return s.str();
}

std::string MeanStd(const RunAggregate& agg, int mean_digits) {
  std::string s = Fixed(agg.mean, mean_digits);
  if (agg.stddev) s += " ± " + Fixed(*agg.stddev, 4);
  return s;
}

int CmdIngest(const GlobalFlags& flags, std::ostream& out, Logger& log) {
  const PipelineConfig config = LoadWithOverrides(flags);
  if (config.corpus.empty()) {
    throw Error(ErrorCode::kConfig, "no corpus paths configured");
  }
  Corpus corpus;
  for (const auto& [split, path] : config.corpus) {
    corpus.entries(split) = LoadCorpus(path, split, config.fields);
    log.Artifact("consumed", path);
  }
  const CorpusStats stats = ValidateCorpus(corpus);
  for (const auto& [split, path] : config.corpus) {
    const fs::path target = config.NormalizedCorpusPath(split);
    WriteCorpus(target, corpus.entries(split));
    log.Artifact("produced", target);
  }
  const std::string stats_json = SerializeStats(stats);
  WriteFileAtomic(config.StatsPath(), stats_json);
  log.Artifact("produced", config.StatsPath());
  out << stats_json;
  return kExitOk;
}

std::unique_ptr<TopicAnnotator> MakeAnnotator(const PipelineConfig& config) {
  if (config.method == AnnotationMethod::kWikifier) {
    return std::make_unique<WikifierClient>(
        config.ResolveWikifier(), std::make_shared<HttplibTransport>(),
        ResponseCache(config.cache_dir));
  }
  return std::make_unique<FallbackAnnotator>(
      config.stopwords_file ? LoadStopwords(*config.stopwords_file)
                            : DefaultStopwords());
}

int CmdAnnotate(const GlobalFlags& flags, std::ostream& out, Logger& log) {
  const PipelineConfig config = LoadWithOverrides(flags);
  const fs::path train_path = config.NormalizedCorpusPath(Split::kTrain);
  if (!fs::exists(train_path)) {
    throw Error(ErrorCode::kInput,
                "normalized train corpus not found: " + train_path.string() +
                    " (run ingest first)");
  }
  const std::vector<CorpusEntry> train =
      LoadCorpus(train_path, Split::kTrain, FieldMapping::Canonical());
  log.Artifact("consumed", train_path);

  std::unique_ptr<TopicAnnotator> annotator = MakeAnnotator(config);
  const AnnotationResult result =
      AnnotateCorpus(train, *annotator,
                     AnnotateOptions{.text = config.train_text,
                                     .on_missing = config.on_missing,
                                     .workers = config.workers});
  for (const std::string& id : result.skipped) {
    log.Event("skipped_document", {{"doc_id", id}});
  }
  if (result.examples.empty()) {
    throw Error(ErrorCode::kAnnotationMissing,
                "no training pair received a topic");
  }
  WriteAnnotations(config.AnnotationsPath(), result.examples);
  log.Artifact("produced", config.AnnotationsPath());

  size_t test_records = 0;
  const fs::path test_path = config.NormalizedCorpusPath(Split::kTest);
  if (fs::exists(test_path)) {
    const std::vector<TestRecord> records = AnnotateTestRecords(
        LoadCorpus(test_path, Split::kTest, FieldMapping::Canonical()),
        *annotator, config.test_text, config.workers);
    log.Artifact("consumed", test_path);
    WriteTestRecords(config.TestRecordsPath(), records);
    log.Artifact("produced", config.TestRecordsPath());
    test_records = records.size();
  }

  ordered_json summary;
  summary["method"] = AnnotationMethodName(annotator->method());
  summary["annotated"] = result.examples.size();
  summary["skipped"] = result.skipped.size();
  summary["test_records"] = test_records;
  if (const auto* client =
          dynamic_cast<const WikifierClient*>(annotator.get())) {
    summary["service_calls"] = client->service_calls();
    summary["cache_hits"] = client->cache_hits();
  } else {
    summary["service_calls"] = 0;
    summary["cache_hits"] = 0;
  }
  log.Event("annotate_done", summary);
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int CmdAugment(const GlobalFlags& flags, const AugmentFlags& aug,
               std::ostream& out, Logger& log) {
  const PipelineConfig config = LoadWithOverrides(flags);
  const std::vector<AnnotatedExample> annotated =
      LoadAnnotations(config.AnnotationsPath());
  log.Artifact("consumed", config.AnnotationsPath());

  std::set<AnnotationMethod> methods;
  for (const AnnotatedExample& ex : annotated) methods.insert(ex.topic.method);
  if (methods.size() != 1) {
    throw Error(ErrorCode::kConfig,
                "annotations mix wikifier and fallback topics");
  }

  DatasetConfig dataset;
  dataset.seed = config.seed;
  dataset.multiplier = aug.multiplier.value_or(config.multiplier);
  dataset.xx = aug.xx || config.xx;
  dataset.baseline = aug.baseline || config.baseline;
  dataset.separator = aug.separator.value_or(config.separator);
  dataset.annotator_method =
      std::string(AnnotationMethodName(*methods.begin()));
  if (dataset.baseline) {
    dataset.multiplier = 1;
    dataset.xx = false;
  }

  std::vector<AugmentedExample> examples;
  std::optional<PairingPlan> plan;
  if (dataset.baseline) {
    examples = MaterializeBaseline(annotated);
  } else {
    std::vector<std::string> topics;
    topics.reserve(annotated.size());
    for (const AnnotatedExample& ex : annotated) {
      topics.push_back(ex.topic.label);
    }
    plan = BuildPairingPlan(annotated.size(), dataset.multiplier, dataset.xx,
                            dataset.seed, topics);
    examples =
        MaterializeExamples(*plan, annotated,
                            MaterializeOptions{.separator = dataset.separator,
                                               .workers = config.workers});
  }

  const fs::path path =
      aug.output ? fs::path(*aug.output)
                 : config.DatasetDir() / (DatasetName(dataset) + ".jsonl");
  const DatasetManifest manifest =
      WriteDataset(examples, path, dataset, plan ? &*plan : nullptr);
  log.Artifact("produced", path);
  log.Artifact("produced", ManifestPath(path));
  out << SerializeManifest(manifest);
  return kExitOk;
}

EmbeddingStore MakeStore(const PipelineConfig& config,
                         const std::vector<TestRecord>& records,
                         const std::vector<ModelOutput>& outputs, Logger& log) {
  switch (config.embedder) {
    case EmbedderKind::kToy:
      return EmbeddingStore::Toy(config.dim);
    case EmbedderKind::kFile:
      log.Artifact("consumed", *config.embedding_file);
      return LoadEmbeddingFile(*config.embedding_file);
    case EmbedderKind::kAdapter:
      break;
  }
  std::vector<std::string> texts;
  for (const ModelOutput& o : outputs) texts.push_back(o.generated_summary);
  for (const TestRecord& r : records) {
    for (const TestTarget& t : r.targets) texts.push_back(t.topic_label);
  }
  const ExchangeOptions exchange = config.Exchange();
  EmbeddingStore store = RequestEmbeddings(texts, exchange);
  log.Artifact("produced", exchange.request_path());
  log.Artifact("consumed", exchange.response_path());
  return store;
}

int CmdEval(const GlobalFlags& flags, const EvalFlags& ev, std::ostream& out,
            Logger& log) {
  PipelineConfig config = LoadWithOverrides(flags);
  if (ev.alternative) {
    const auto mode = ParseAlternativeMode(*ev.alternative);
    if (!mode) {
      throw Error(ErrorCode::kConfig,
                  "--alternative must be cyclic_next or best_of_rest");
    }
    config.alternative_mode = *mode;
  }
  const std::optional<fs::path> outputs_path =
      ev.model_outputs ? std::optional<fs::path>(*ev.model_outputs)
                       : config.model_outputs;
  if (!outputs_path) {
    throw Error(ErrorCode::kConfig, "no model output file given");
  }

  const std::vector<TestRecord> records =
      LoadTestRecords(config.TestRecordsPath());
  log.Artifact("consumed", config.TestRecordsPath());
  const std::vector<ModelOutput> outputs = LoadModelOutputs(*outputs_path);
  log.Artifact("consumed", *outputs_path);

  const Expansion expansion = ExpandTestRecords(records);
  const EmbeddingStore store = MakeStore(config, records, outputs, log);
  const std::vector<EvalInstance> instances = JoinModelOutputs(
      records, expansion, outputs, config.alternative_mode, &store);
  WinRateReport report = WinRate(instances, store, config.workers);
  report.alternative_mode =
      std::string(AlternativeModeName(config.alternative_mode));
  report.skipped_records = expansion.skipped_records.size();

  nlohmann::json echo = nlohmann::json::object();
  if (ev.manifest) {
    const DatasetManifest manifest = LoadManifest(*ev.manifest);
    log.Artifact("consumed", *ev.manifest);
    echo["seed"] = manifest.config.seed;
    echo["multiplier"] = manifest.config.multiplier;
    echo["xx"] = manifest.config.xx;
    echo["baseline"] = manifest.config.baseline;
    echo["separator"] = manifest.config.separator;
    echo["annotator_method"] = manifest.config.annotator_method;
  }
  echo["embedder"] = report.embedder;
  echo["embedding_dim"] = report.embedding_dim;
  echo["alternative_mode"] = report.alternative_mode;
  report.config = std::move(echo);

  const std::optional<fs::path> scores_path =
      ev.external_scores ? std::optional<fs::path>(*ev.external_scores)
                         : config.external_scores;
  if (scores_path) {
    std::set<std::string> ids;
    for (const EvalInstance& i : instances) {
      ids.insert(InstanceId(i.record_id, i.target_index));
    }
    report.external_score_mean = IngestExternalScores(*scores_path, &ids).mean;
    log.Artifact("consumed", *scores_path);
  }

  const fs::path report_path =
      ev.output ? fs::path(*ev.output)
                : config.ReportDir() /
                      (outputs_path->stem().string() + ".report.json");
  const std::string serialized = SerializeReport(report);
  WriteFileAtomic(report_path, serialized);
  log.Artifact("produced", report_path);
  out << serialized;
  return kExitOk;
}

int CmdReport(const ReportFlags& flags, std::ostream& out, Logger& log) {
  std::vector<WinRateReport> reports;
  for (const std::string& path : flags.reports) {
    reports.push_back(LoadReport(path));
    log.Artifact("consumed", path);
  }
  const RunAggregate win = AggregateRuns(reports);
  std::optional<RunAggregate> external;
  std::vector<double> external_values;
  for (const WinRateReport& r : reports) {
    if (r.external_score_mean)
      external_values.push_back(*r.external_score_mean);
  }
  if (!external_values.empty() && external_values.size() == reports.size()) {
    external = AggregateValues(external_values);
  }

  const std::string label = ModelLabel(reports.front().config);
  out << "| Model | BERTScore | Win rate (%) |\n";
  out << "|---|---|---|\n";
  out << "| " << label << " | " << (external ? MeanStd(*external, 4) : "-")
      << " | " << MeanStd(win, 2) << " |\n";

  if (flags.output) {
    ordered_json agg;
    agg["model"] = label;
    agg["runs"] = win.runs;
    agg["win_rate_mean"] = win.mean;
    agg["win_rate_std"] = win.stddev ? ordered_json(*win.stddev) : nullptr;
    if (external) {
      agg["external_score_mean"] = external->mean;
      agg["external_score_std"] =
          external->stddev ? ordered_json(*external->stddev) : nullptr;
    }
    agg["embedder"] = reports.front().embedder;
    agg["config"] = reports.front().config;
    WriteFileAtomic(*flags.output, agg.dump(2) + "\n");
    log.Artifact("produced", *flags.output);
  }
  return kExitOk;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kService:
      return kExitService;
    case ErrorCode::kTransport:
      return kExitTransport;
    default:
      return kExitInput;
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Topic-controlled pairwise augmentation and win-rate toolkit",
               "tcsaug"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--config", global.config_path, "Pipeline config (JSON)");
  app.add_option("--workers", global.workers, "Worker threads");
  app.add_option("--seed", global.seed, "Override the augmentation seed");

  CLI::App* ingest = app.add_subcommand("ingest", "Load and validate corpus");
  CLI::App* annotate =
      app.add_subcommand("annotate", "Attach salient topics to training pairs");

  AugmentFlags aug;
  CLI::App* augment =
      app.add_subcommand("augment", "Build a Baseline/TCS dataset");
  augment->add_option("--multiplier", aug.multiplier, "Pairing rounds (kX)");
  augment->add_flag("--xx", aug.xx, "Also emit order-mirrored contexts");
  augment->add_flag("--baseline", aug.baseline, "Single-context baseline");
  augment->add_option("--separator", aug.separator, "Abstract separator");
  augment->add_option("--output", aug.output, "Dataset path");

  EvalFlags ev;
  CLI::App* eval =
      app.add_subcommand("eval", "Score model outputs by win rate");
  eval->add_option("--model-outputs", ev.model_outputs, "Model output file");
  eval->add_option("--manifest", ev.manifest,
                   "Manifest of the training dataset, echoed in the report");
  eval->add_option("--external-scores", ev.external_scores,
                   "Per-example external scores (e.g. BERTScore)");
  eval->add_option("--alternative", ev.alternative,
                   "cyclic_next or best_of_rest");
  eval->add_option("--output", ev.output, "Report path");

  ReportFlags rep;
  CLI::App* report = app.add_subcommand("report", "Aggregate run reports");
  report->add_option("reports", rep.reports, "Report files")->required();
  report->add_option("--output", rep.output, "Aggregate JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Logger log(err);
  try {
    if (*ingest) return CmdIngest(global, out, log);
    if (*annotate) return CmdAnnotate(global, out, log);
    if (*augment) return CmdAugment(global, aug, out, log);
    if (*eval) return CmdEval(global, ev, out, log);
    if (*report) return CmdReport(rep, out, log);
  } catch (const Error& e) {
    const int code = ExitCodeFor(e.code());
    ordered_json record;
    record["level"] = "error";
    record["error"] = ErrorCodeName(e.code());
    record["exit_code"] = code;
    record["message"] = e.what();
    err << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
        << "\n";
    return code;
  } catch (const std::exception& e) {
    ordered_json record;
    record["level"] = "error";
    record["error"] = "internal";
    record["exit_code"] = kExitInternal;
    record["message"] = e.what();
    err << record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
        << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace tcsaug
