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

#include "tcsaug/annotate.h"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "tcsaug/error.h"
#include "tcsaug/io.h"
#include "tcsaug/wikifier.h"

namespace tcsaug {
namespace {

using testing::ScratchDir;

const std::filesystem::path kData = TCSAUG_TEST_DATA_DIR;

// Scripted transport: returns canned bodies or fails, counting calls.
class FakeTransport : public HttpTransport {
 public:
  HttpResponse PostForm(const std::string& url, const FormFields& form,
                        std::chrono::milliseconds) override {
    std::lock_guard<std::mutex> lock(mutex_);
    ++calls;
    last_url = url;
    last_form = form;
    if (fail_transport)
      throw Error(ErrorCode::kTransport, "connection refused");
    return response;
  }

  std::mutex mutex_;
  int calls = 0;
  bool fail_transport = false;
  HttpResponse response{200, "{\"annotations\": []}"};
  std::string last_url;
  FormFields last_form;
};

WikifierConfig TestConfig() {
  WikifierConfig c;
  c.endpoint = "http://wikifier.test/annotate-article";
  c.credential = "test-key";
  c.max_retries = 2;
  c.retry_backoff = std::chrono::milliseconds(0);
  return c;
}

TEST(FallbackAnnotate, FrequencyRanking) {
  const auto out = FallbackAnnotate("graph graph attention network", {});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].label, "graph");
  EXPECT_DOUBLE_EQ(out[0].confidence, 2.0 / 4.0);
  EXPECT_EQ(out[0].method, AnnotationMethod::kFallback);
  EXPECT_EQ(out[1].label, "attention");
  EXPECT_EQ(out[2].label, "network");
}

TEST(FallbackAnnotate, AllStopwordsGivesEmptyList) {
  EXPECT_TRUE(FallbackAnnotate("a an the", DefaultStopwords()).empty());
}

TEST(FallbackAnnotate, TiesBrokenByFirstOccurrence) {
  const auto out = FallbackAnnotate("alpha beta", DefaultStopwords());
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].label, "alpha");
  EXPECT_EQ(out[1].label, "beta");
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.5);
  EXPECT_DOUBLE_EQ(out[1].confidence, 0.5);
}

TEST(FallbackAnnotate, DropsShortTokensLowercasesAndCapsAtFive) {
  const auto out = FallbackAnnotate(
      "AI is ok; Kernel kernel-KERNEL, one two three four five six", {});
  // Kept: kernel x3, one two three four five six -> 9 tokens.
  ASSERT_EQ(out.size(), 5u);
  EXPECT_EQ(out[0].label, "kernel");
  EXPECT_DOUBLE_EQ(out[0].confidence, 3.0 / 9.0);
  EXPECT_EQ(out[1].label, "one");
  EXPECT_EQ(out[4].label, "four");
}

TEST(FallbackAnnotate, EmptyTextIsPreconditionError) {
  try {
    FallbackAnnotate("   ", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
}

TEST(SelectSalientTopic, MaxConfidenceThenSmallestLabel) {
  EXPECT_EQ(SelectSalientTopic({{"A", 0.7}, {"B", 0.9}}).label, "B");
  EXPECT_EQ(SelectSalientTopic({{"B", 0.5}, {"A", 0.5}}).label, "A");
  try {
    SelectSalientTopic({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAnnotationMissing);
  }
}

TEST(SelectSalientTopic, InvariantUnderPermutation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TopicCandidate> c;
    const size_t n = 1 + rng() % 8;
    for (size_t i = 0; i < n; ++i) {
      // Coarse confidences make ties common.
      c.push_back({std::string(1, static_cast<char>('a' + rng() % 6)),
                   static_cast<double>(rng() % 4) / 4.0});
    }
    const TopicCandidate expected = SelectSalientTopic(c);
    for (int p = 0; p < 5; ++p) {
      std::shuffle(c.begin(), c.end(), rng);
      EXPECT_EQ(SelectSalientTopic(c), expected);
    }
  }
}

TEST(Wikifier, ReplayFixtureTopConceptIsNeuralNetworkRelated) {
  auto transport = std::make_shared<FakeTransport>();
  transport->response.body = ReadFile(kData / "wikifier_backprop.json");
  WikifierClient client(TestConfig(), transport);
  const auto out =
      client.Wikify("neural networks trained with backpropagation");
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0].label, "Artificial neural network");
  EXPECT_EQ(out[0].method, AnnotationMethod::kWikifier);
  EXPECT_EQ(SelectSalientTopic(out).label, "Artificial neural network");
  for (size_t i = 1; i < out.size(); ++i) {
    EXPECT_GE(out[i - 1].confidence, out[i].confidence);
  }
}

TEST(Wikifier, CandidatesSortedByConfidence) {
  auto transport = std::make_shared<FakeTransport>();
  transport->response.body = ReadFile(kData / "wikifier_two.json");
  WikifierClient client(TestConfig(), transport);
  const auto out = client.Wikify("graph attention");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
  EXPECT_DOUBLE_EQ(out[1].confidence, 0.4);
}

TEST(Wikifier, SendsCredentialAndText) {
  auto transport = std::make_shared<FakeTransport>();
  WikifierClient client(TestConfig(), transport);
  EXPECT_TRUE(client.Wikify("some text").empty());
  EXPECT_EQ(transport->last_url, "http://wikifier.test/annotate-article");
  auto field = [&](const std::string& key) {
    for (const auto& [k, v] : transport->last_form) {
      if (k == key) return v;
    }
    return std::string("<missing>");
  };
  EXPECT_EQ(field("text"), "some text");
  EXPECT_EQ(field("userKey"), "test-key");
}

TEST(Wikifier, EmptyTextIsPreconditionError) {
  auto transport = std::make_shared<FakeTransport>();
  WikifierClient client(TestConfig(), transport);
  try {
    client.Wikify("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
  }
  EXPECT_EQ(transport->calls, 0);
}

TEST(Wikifier, TransportFailureRetriesThenSurfaces) {
  auto transport = std::make_shared<FakeTransport>();
  transport->fail_transport = true;
  WikifierClient client(TestConfig(), transport);
  try {
    client.Wikify("text");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_EQ(transport->calls, 3);
}

TEST(Wikifier, ServiceErrorCarriesPayloadAndIsNotRetried) {
  auto transport = std::make_shared<FakeTransport>();
  transport->response = {503, "upstream overloaded, try later"};
  WikifierClient client(TestConfig(), transport);
  try {
    client.Wikify("text");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kService);
    EXPECT_NE(std::string(e.what()).find("upstream overloaded"),
              std::string::npos);
  }
  EXPECT_EQ(transport->calls, 1);
}

TEST(Wikifier, MalformedPayloadIsServiceError) {
  auto transport = std::make_shared<FakeTransport>();
  transport->response = {200, "<html>oops</html>"};
  WikifierClient client(TestConfig(), transport);
  try {
    client.Wikify("text");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kService);
  }
}

TEST(Wikifier, WarmCacheMakesNoServiceCalls) {
  ScratchDir dir;
  auto transport = std::make_shared<FakeTransport>();
  transport->response.body = ReadFile(kData / "wikifier_backprop.json");
  WikifierClient cold(TestConfig(), transport, ResponseCache(dir / "cache"));
  const auto first =
      cold.Wikify("neural networks trained with backpropagation");
  EXPECT_EQ(cold.service_calls(), 1u);
  EXPECT_TRUE(std::filesystem::exists(
      dir / "cache" /
      (ResponseCache::KeyFor("neural networks trained with backpropagation") +
       ".json")));

  auto offline = std::make_shared<FakeTransport>();
  offline->fail_transport = true;
  WikifierConfig no_key = TestConfig();
  no_key.credential.clear();
  WikifierClient warm(no_key, offline, ResponseCache(dir / "cache"));
  EXPECT_EQ(warm.Wikify("neural networks trained with backpropagation"), first);
  EXPECT_EQ(warm.service_calls(), 0u);
  EXPECT_EQ(warm.cache_hits(), 1u);
  EXPECT_EQ(offline->calls, 0);
}

TEST(Wikifier, HttplibTransportAgainstLocalServer) {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_text;
  server.Post("/annotate-article", [&](const httplib::Request& req,
                                       httplib::Response& res) {
    ++hits;
    seen_text = req.get_param_value("text");
    res.set_content(R"({"annotations":[{"title":"Graph","pageRank":0.3}]})",
                    "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  WikifierConfig config = TestConfig();
  config.endpoint =
      "http://127.0.0.1:" + std::to_string(port) + "/annotate-article";
  WikifierClient client(config, std::make_shared<HttplibTransport>());
  const auto out = client.Wikify("graph neural networks");
  server.stop();
  thread.join();

  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].label, "Graph");
  EXPECT_EQ(hits.load(), 1);
  EXPECT_EQ(seen_text, "graph neural networks");
}

TEST(Wikifier, HttplibTransportConnectionRefused) {
  WikifierConfig config = TestConfig();
  config.endpoint = "http://127.0.0.1:1/annotate-article";
  config.max_retries = 1;
  config.timeout = std::chrono::milliseconds(500);
  WikifierClient client(config, std::make_shared<HttplibTransport>());
  try {
    client.Wikify("text");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTransport);
  }
  EXPECT_EQ(client.service_calls(), 2u);
}

// Returns no candidates for texts containing "barren".
class SelectiveAnnotator : public TopicAnnotator {
 public:
  AnnotationMethod method() const override {
    return AnnotationMethod::kFallback;
  }
  std::vector<TopicCandidate> Annotate(std::string_view text) override {
    ++calls;
    if (text.find("barren") != std::string_view::npos) return {};
    return FallbackAnnotate(text, {});
  }
  std::atomic<int> calls{0};
};

std::vector<CorpusEntry> FixtureTrain(size_t n) {
  std::vector<CorpusEntry> out;
  for (size_t i = 0; i < n; ++i) {
    const std::string id = "train-" + std::to_string(i);
    out.push_back(CorpusEntry{
        .document = {.doc_id = id, .abstract_text = testing::TrainAbstract(i)},
        .summaries = {{id, 0, testing::TrainSummary(i)}}});
  }
  return out;
}

TEST(AnnotateCorpus, FallbackFixtureMatchesHandComputedTopics) {
  const auto train = FixtureTrain(10);
  FallbackAnnotator annotator;
  const auto result = AnnotateCorpus(train, annotator);
  ASSERT_EQ(result.examples.size(), 10u);
  EXPECT_TRUE(result.skipped.empty());
  for (size_t i = 0; i < 10; ++i) {
    const AnnotatedExample& ex = result.examples[i];
    // Abstract + summary keeps: study x2, term<i> x4, networks, model,
    // improves, accuracy, benchmark, data -> 12 tokens.
    EXPECT_EQ(ex.topic.label, testing::TrainTerm(i));
    EXPECT_DOUBLE_EQ(ex.topic.confidence, 4.0 / 12.0);
    EXPECT_EQ(ex.abstract_text, train[i].document.abstract_text);
    EXPECT_EQ(ex.summary_text, train[i].summaries[0].summary_text);
    EXPECT_EQ(ex.doc_id, train[i].document.doc_id);
  }
}

TEST(AnnotateCorpus, EmptyInputGivesEmptyOutput) {
  FallbackAnnotator annotator;
  const auto result = AnnotateCorpus({}, annotator);
  EXPECT_TRUE(result.examples.empty());
  EXPECT_TRUE(result.skipped.empty());
}

TEST(AnnotateCorpus, SkipOrAbortOnMissingTopics) {
  auto train = FixtureTrain(4);
  train[2].document.abstract_text = "barren";
  SelectiveAnnotator annotator;
  const auto skipped = AnnotateCorpus(train, annotator);
  EXPECT_EQ(skipped.examples.size(), 3u);
  ASSERT_EQ(skipped.skipped.size(), 1u);
  EXPECT_EQ(skipped.skipped[0], "train-2");

  try {
    AnnotateCorpus(train, annotator,
                   {.on_missing = MissingTopicPolicy::kAbort});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAnnotationMissing);
    EXPECT_NE(std::string(e.what()).find("train-2"), std::string::npos);
  }
}

TEST(AnnotateCorpus, AbstractOnlyMode) {
  const auto train = FixtureTrain(1);
  EXPECT_EQ(AnnotationInput(train[0], train[0].summaries[0],
                            AnnotationText::kAbstractOnly),
            train[0].document.abstract_text);
  EXPECT_EQ(AnnotationInput(train[0], train[0].summaries[0],
                            AnnotationText::kAbstractAndSummary),
            train[0].document.abstract_text + " " +
                train[0].summaries[0].summary_text);
}

TEST(AnnotateCorpus, OutputOrderIndependentOfWorkers) {
  const auto train = FixtureTrain(50);
  FallbackAnnotator annotator;
  const auto serial = AnnotateCorpus(train, annotator, {.workers = 1});
  const auto parallel = AnnotateCorpus(train, annotator, {.workers = 8});
  EXPECT_EQ(SerializeAnnotations(serial.examples),
            SerializeAnnotations(parallel.examples));
}

TEST(AnnotateCorpus, WarmCacheRunIsByteIdenticalWithZeroCalls) {
  ScratchDir dir;
  const auto train = FixtureTrain(5);
  auto transport = std::make_shared<FakeTransport>();
  transport->response.body = ReadFile(kData / "wikifier_two.json");
  WikifierClient cold(TestConfig(), transport, ResponseCache(dir / "cache"));
  const auto first = AnnotateCorpus(train, cold, {.workers = 4});
  EXPECT_EQ(cold.service_calls(), 5u);

  auto offline = std::make_shared<FakeTransport>();
  offline->fail_transport = true;
  WikifierClient warm(TestConfig(), offline, ResponseCache(dir / "cache"));
  const auto second = AnnotateCorpus(train, warm);
  EXPECT_EQ(warm.service_calls(), 0u);
  EXPECT_EQ(SerializeAnnotations(first.examples),
            SerializeAnnotations(second.examples));
}

TEST(Annotations, FileRoundTrip) {
  ScratchDir dir;
  FallbackAnnotator annotator;
  const auto result = AnnotateCorpus(FixtureTrain(6), annotator);
  WriteAnnotations(dir / "a.jsonl", result.examples);
  EXPECT_EQ(LoadAnnotations(dir / "a.jsonl"), result.examples);
}

}  // namespace
}  // namespace tcsaug
