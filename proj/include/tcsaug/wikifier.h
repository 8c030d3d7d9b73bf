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

#ifndef TCSAUG_WIKIFIER_H_
#define TCSAUG_WIKIFIER_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tcsaug/annotate.h"

namespace tcsaug {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using FormFields = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Sends an application/x-www-form-urlencoded POST. Throws
  // Error(kTransport) when no response was received.
  virtual HttpResponse PostForm(const std::string& url, const FormFields& form,
                                std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport; one connection per request.
class HttplibTransport : public HttpTransport {
 public:
  HttpResponse PostForm(const std::string& url, const FormFields& form,
                        std::chrono::milliseconds timeout) override;
};

// Raw service responses on disk, one file per request text, named by the
// SHA-256 of that text.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string KeyFor(std::string_view request_text);

  std::optional<std::string> Get(const std::string& key) const;
  void Put(const std::string& key, std::string_view body) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path PathFor(const std::string& key) const;

  std::filesystem::path dir_;
};

struct WikifierConfig {
  std::string endpoint = "http://www.wikifier.org/annotate-article";
  std::string credential;
  std::string language = "en";
  // Response field used as the confidence of each concept.
  std::string ranking_field = "pageRank";
  double page_rank_sq_threshold = 0.8;
  std::chrono::milliseconds timeout{10000};
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{500};
};

// Parses a Wikifier JSON response into candidates sorted by confidence
// descending (ties by label). Scores outside [0, 1] are clamped. Throws
// Error(kService) if the payload is not a recognizable response.
std::vector<TopicCandidate> ParseWikifierResponse(
    std::string_view body, const std::string& ranking_field);

class WikifierClient : public TopicAnnotator {
 public:
  WikifierClient(WikifierConfig config,
                 std::shared_ptr<HttpTransport> transport,
                 std::optional<ResponseCache> cache = std::nullopt);

  AnnotationMethod method() const override {
    return AnnotationMethod::kWikifier;
  }
  std::vector<TopicCandidate> Annotate(std::string_view text) override {
    return Wikify(text);
  }

  // Cache first; on a miss, POSTs to the service with up to max_retries
  // retries on transport failure. A non-2xx reply is a service error and is
  // not retried.
  std::vector<TopicCandidate> Wikify(std::string_view text);

  size_t service_calls() const { return service_calls_.load(); }
  size_t cache_hits() const { return cache_hits_.load(); }

 private:
  std::string Fetch(std::string_view text);

  WikifierConfig config_;
  std::shared_ptr<HttpTransport> transport_;
  std::optional<ResponseCache> cache_;
  std::atomic<size_t> service_calls_{0};
  std::atomic<size_t> cache_hits_{0};
};

}  // namespace tcsaug

#endif  // TCSAUG_WIKIFIER_H_
