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

#include <stdlib.h>

#include <atomic>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "tcsaug/augment.h"
#include "tcsaug/embed.h"
#include "tcsaug/eval.h"
#include "tcsaug/io.h"

namespace tcsaug {
namespace {

using nlohmann::json;
using testing::ScratchDir;
using testing::WriteText;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult RunArgs(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fixture_ = testing::MakeFixtureCorpus(dir_ / "data",
                                          {.n_train = 100, .n_test = 6});
    config_ = {{"work_dir", "out"},
               {"corpus",
                {{"train", "data/train.jsonl"},
                 {"validation", "data/dev.jsonl"},
                 {"test", "data/test.jsonl"}}},
               {"annotate", {{"method", "fallback"}}},
               {"augment", {{"seed", 5}}},
               {"embed", {{"kind", "toy"}, {"dim", 256}}}};
    SaveConfig();
  }

  void SaveConfig() { WriteText(ConfigPath(), config_.dump(2)); }
  std::string ConfigPath() const { return (dir_ / "tcsaug.json").string(); }

  CliResult Cmd(std::vector<std::string> args) {
    args.insert(args.begin(), {"--config", ConfigPath()});
    return RunArgs(args);
  }

  void IngestAndAnnotate() {
    ASSERT_EQ(Cmd({"ingest"}).code, kExitOk);
    const CliResult r = Cmd({"annotate"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }

  std::filesystem::path Out(const std::string& rel) const {
    return dir_ / "out" / rel;
  }

  // One generated summary per expandable test target.
  std::filesystem::path WriteOutputs(size_t drop = 0) {
    const auto records = LoadTestRecords(Out("annotations/test_records.jsonl"));
    std::string text;
    std::vector<std::string> lines;
    for (const auto& r : records) {
      for (const auto& t : r.targets) {
        json line = {{"record_id", r.record_id},
                     {"target_index", t.target_index},
                     {"generated_summary", "We report " + t.topic_label + "."}};
        lines.push_back(line.dump());
      }
    }
    lines.resize(lines.size() - drop);
    for (const auto& l : lines) text += l + "\n";
    const auto path = dir_ / "outputs.jsonl";
    WriteText(path, text);
    return path;
  }

  ScratchDir dir_;
  testing::FixtureCorpus fixture_;
  json config_;
};

TEST_F(CliTest, IngestPrintsStats) {
  const CliResult r = Cmd({"ingest"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json stats = json::parse(r.out);
  EXPECT_EQ(stats["n_train"], 100);
  EXPECT_EQ(stats["n_validation"], 3);
  EXPECT_EQ(stats["n_test"], 6);
  EXPECT_EQ(stats["summaries_per_test_doc"]["3"], 6);
  EXPECT_TRUE(std::filesystem::exists(Out("corpus/train.jsonl")));
  EXPECT_TRUE(std::filesystem::exists(Out("corpus/stats.json")));
}

TEST_F(CliTest, IngestMissingFileNamesPath) {
  std::filesystem::remove(fixture_.test);
  const CliResult r = Cmd({"ingest"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("test.jsonl"), std::string::npos) << r.err;
}

TEST_F(CliTest, AnnotateBeforeIngestFails) {
  const CliResult r = Cmd({"annotate"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("ingest"), std::string::npos);
}

TEST_F(CliTest, FallbackAnnotationIsDeterministic) {
  IngestAndAnnotate();
  const std::string first = ReadFile(Out("annotations/train.jsonl"));
  const std::string tests = ReadFile(Out("annotations/test_records.jsonl"));
  ASSERT_EQ(Cmd({"--workers", "8", "annotate"}).code, kExitOk);
  EXPECT_EQ(ReadFile(Out("annotations/train.jsonl")), first);
  EXPECT_EQ(ReadFile(Out("annotations/test_records.jsonl")), tests);
  const json line = json::parse(first.substr(0, first.find('\n')));
  EXPECT_EQ(line["topic"], "term0");
  EXPECT_EQ(line["topic_method"], "fallback");
}

TEST_F(CliTest, AugmentSizes) {
  IngestAndAnnotate();
  auto count = [](const std::string& manifest) {
    return json::parse(manifest)["example_count"].get<size_t>();
  };
  CliResult r = Cmd({"augment", "--baseline"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(count(r.out), 100u);
  EXPECT_TRUE(std::filesystem::exists(Out("datasets/baseline.jsonl")));

  r = Cmd({"augment", "--multiplier", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(count(r.out), 300u);
  EXPECT_TRUE(std::filesystem::exists(Out("datasets/tcs3x_seed5.jsonl")));
  EXPECT_TRUE(
      std::filesystem::exists(Out("datasets/tcs3x_seed5.jsonl.manifest.json")));

  r = Cmd({"--seed", "9", "augment", "--multiplier", "1", "--xx"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(count(r.out), 200u);
  EXPECT_TRUE(std::filesystem::exists(Out("datasets/tcs1xx_seed9.jsonl")));
}

TEST_F(CliTest, AugmentIsReproducible) {
  IngestAndAnnotate();
  const CliResult a = Cmd({"augment", "--multiplier", "2", "--output",
                           (dir_ / "a.jsonl").string()});
  const CliResult b = Cmd({"--workers", "8", "augment", "--multiplier", "2",
                           "--output", (dir_ / "b.jsonl").string()});
  ASSERT_EQ(a.code, kExitOk);
  ASSERT_EQ(b.code, kExitOk);
  EXPECT_EQ(ReadFile(dir_ / "a.jsonl"), ReadFile(dir_ / "b.jsonl"));
  EXPECT_EQ(json::parse(a.out)["checksum_sha256"],
            json::parse(b.out)["checksum_sha256"]);
}

TEST_F(CliTest, EvalToyReport) {
  IngestAndAnnotate();
  const auto outputs = WriteOutputs();
  const CliResult r = Cmd({"eval", "--model-outputs", outputs.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["total"], 18);
  EXPECT_EQ(report["embedder"], "toy");
  EXPECT_EQ(report["alternative_mode"], "cyclic_next");
  // Each summary names its own topic and no other.
  EXPECT_DOUBLE_EQ(report["win_rate_percent"].get<double>(), 100.0);
  EXPECT_TRUE(std::filesystem::exists(Out("reports/outputs.report.json")));
}

TEST_F(CliTest, EvalMissingRowsNamed) {
  IngestAndAnnotate();
  const auto outputs = WriteOutputs(/*drop=*/2);
  const CliResult r = Cmd({"eval", "--model-outputs", outputs.string()});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("test-5#1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("test-5#2"), std::string::npos) << r.err;
}

TEST_F(CliTest, EvalWithAdapterExchange) {
  IngestAndAnnotate();
  const auto outputs = WriteOutputs();
  // Canned adapter response covering every summary and topic.
  std::set<std::string> texts;
  for (const auto& o : LoadModelOutputs(outputs)) {
    texts.insert(o.generated_summary);
  }
  for (const auto& r : LoadTestRecords(Out("annotations/test_records.jsonl"))) {
    for (const auto& t : r.targets) texts.insert(t.topic_label);
  }
  std::string canned;
  for (const auto& t : texts) {
    const EmbeddingVector v = ToyEmbed(t, 32);
    canned +=
        json({{"key", v.key}, {"dim", 32}, {"values", v.values}}).dump() + "\n";
  }
  WriteText(dir_ / "canned.jsonl", canned);
  config_["embed"] = {
      {"kind", "adapter"},
      {"exchange_dir", "exchange"},
      {"adapter_command",
       "cp '" + (dir_ / "canned.jsonl").string() + "' '" +
           (dir_ / "exchange/embed_response.jsonl").string() + "'"}};
  SaveConfig();
  const CliResult r = Cmd({"eval", "--model-outputs", outputs.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["embedder"], "adapter");
  EXPECT_EQ(report["embedding_dim"], 32);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "exchange/embed_request.jsonl"));
}

TEST_F(CliTest, ReportAggregatesSeeds) {
  IngestAndAnnotate();
  const auto outputs = WriteOutputs();
  std::vector<std::string> reports;
  for (const char* seed : {"1", "2"}) {
    ASSERT_EQ(Cmd({"--seed", seed, "augment", "--multiplier", "2"}).code,
              kExitOk);
    const std::string report =
        (dir_ / ("r" + std::string(seed) + ".json")).string();
    const CliResult r = Cmd(
        {"eval", "--model-outputs", outputs.string(), "--manifest",
         Out("datasets/tcs2x_seed" + std::string(seed) + ".jsonl.manifest.json")
             .string(),
         "--output", report});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    reports.push_back(report);
  }
  const CliResult r = RunArgs({"report", reports[0], reports[1]});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("| TCS2X | - | 100.00 ± 0.0000 |"), std::string::npos)
      << r.out;
}

void WriteReport(const std::filesystem::path& path, double rate, int seed,
                 int multiplier) {
  WinRateReport r;
  r.win_rate_percent = rate;
  r.embedder = "toy";
  r.embedding_dim = 256;
  r.config = {{"seed", seed},
              {"multiplier", multiplier},
              {"xx", false},
              {"baseline", false}};
  WriteText(path, SerializeReport(r));
}

TEST(CliReport, MeanStdSingleAndMixed) {
  ScratchDir dir;
  WriteReport(dir / "a.json", 36.29, 1, 3);
  WriteReport(dir / "b.json", 37.31, 2, 3);
  WriteReport(dir / "c.json", 30.0, 3, 5);
  CliResult r =
      RunArgs({"report", (dir / "a.json").string(), (dir / "b.json").string(),
               "--output", (dir / "agg.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("| TCS3X | - | 36.80 ± 0.7212 |"), std::string::npos)
      << r.out;
  EXPECT_NEAR(
      json::parse(ReadFile(dir / "agg.json"))["win_rate_std"].get<double>(),
      0.7212, 1e-4);

  r = RunArgs({"report", (dir / "c.json").string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("| TCS5X | - | 30.00 |"), std::string::npos) << r.out;

  r = RunArgs({"report", (dir / "a.json").string(), (dir / "c.json").string()});
  EXPECT_EQ(r.code, kExitConfig);
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(RunArgs({"--config", (dir_ / "nope.json").string(), "ingest"}).code,
            kExitConfig);
  config_["annotate"]["wikifier"] = {{"user_key", "secret"}};
  SaveConfig();
  CliResult r = Cmd({"ingest"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_EQ(r.err.find("secret"), std::string::npos);
  config_["annotate"].erase("wikifier");
  config_["bogus"] = 1;
  SaveConfig();
  EXPECT_EQ(Cmd({"ingest"}).code, kExitConfig);
  EXPECT_EQ(RunArgs({"frobnicate"}).code, kExitConfig);
}

TEST_F(CliTest, WikifierServiceDownIsTransportError) {
  ASSERT_EQ(Cmd({"ingest"}).code, kExitOk);
  ::setenv("TCSAUG_TEST_KEY", "k", 1);
  config_["annotate"] = {{"method", "wikifier"},
                         {"wikifier",
                          {{"endpoint", "http://127.0.0.1:1/annotate-article"},
                           {"credential_env", "TCSAUG_TEST_KEY"},
                           {"timeout_ms", 500},
                           {"max_retries", 0}}}};
  SaveConfig();
  const CliResult r = Cmd({"annotate"});
  EXPECT_EQ(r.code, kExitTransport) << r.err;
}

TEST_F(CliTest, WikifierWarmCacheRunsOffline) {
  ASSERT_EQ(Cmd({"ingest"}).code, kExitOk);
  httplib::Server server;
  std::atomic<int> hits{0};
  const std::regex term("(term\\d+|aspect\\d+m\\d+)");
  server.Post("/annotate-article", [&](const httplib::Request& req,
                                       httplib::Response& res) {
    ++hits;
    std::smatch m;
    const std::string text = req.get_param_value("text");
    std::string title = "Unknown";
    if (std::regex_search(text, m, term)) title = "Topic " + m.str(1);
    res.set_content(
        json({{"annotations", {{{"title", title}, {"pageRank", 0.5}}}}}).dump(),
        "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("TCSAUG_TEST_KEY", "k", 1);
  config_["annotate"] = {
      {"method", "wikifier"},
      {"wikifier",
       {{"endpoint",
         "http://127.0.0.1:" + std::to_string(port) + "/annotate-article"},
        {"credential_env", "TCSAUG_TEST_KEY"}}}};
  SaveConfig();
  CliResult r = Cmd({"annotate"});
  server.stop();
  thread.join();
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["service_calls"], hits.load());
  EXPECT_GT(hits.load(), 0);
  const std::string warm = ReadFile(Out("annotations/train.jsonl"));
  EXPECT_NE(warm.find("Topic term7"), std::string::npos);

  // Same config, service gone: everything must come from the cache.
  r = Cmd({"annotate"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["service_calls"], 0);
  EXPECT_EQ(ReadFile(Out("annotations/train.jsonl")), warm);

  // Augment runs on wikifier topics.
  ASSERT_EQ(Cmd({"augment", "--multiplier", "1"}).code, kExitOk);
  const auto examples = LoadDataset(Out("datasets/tcs1x_seed5.jsonl"));
  EXPECT_EQ(examples.size(), 100u);
  EXPECT_EQ(examples[0].topic_label.rfind("Topic term", 0), 0u);
}

}  // namespace
}  // namespace tcsaug
