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

#include "tcsaug/wikifier.h"

#include <algorithm>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tcsaug/error.h"
#include "tcsaug/io.h"

namespace tcsaug {
namespace {

constexpr size_t kExcerptBytes = 200;

std::string Excerpt(std::string_view body) {
  if (body.size() <= kExcerptBytes) return std::string(body);
  return std::string(body.substr(0, kExcerptBytes)) + "...";
}

// Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  const size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "endpoint is not an absolute URL: " + url);
  }
  const size_t path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse HttplibTransport::PostForm(const std::string& url,
                                        const FormFields& form,
                                        std::chrono::milliseconds timeout) {
  const auto [base, path] = SplitUrl(url);
  httplib::Client client(base);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Params params;
  for (const auto& [key, value] : form) params.emplace(key, value);
  httplib::Result result = client.Post(path, params);
  if (!result) {
    throw Error(ErrorCode::kTransport, "POST " + url + " failed: " +
                                           httplib::to_string(result.error()));
  }
  return HttpResponse{.status = result->status, .body = result->body};
}

std::string ResponseCache::KeyFor(std::string_view request_text) {
  return Sha256Hex(request_text);
}

std::filesystem::path ResponseCache::PathFor(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<std::string> ResponseCache::Get(const std::string& key) const {
  const std::filesystem::path path = PathFor(key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return ReadFile(path);
}

void ResponseCache::Put(const std::string& key, std::string_view body) const {
  WriteFileAtomic(PathFor(key), body);
}

std::vector<TopicCandidate> ParseWikifierResponse(
    std::string_view body, const std::string& ranking_field) {
  nlohmann::json response;
  try {
    response = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorCode::kService,
                "unparseable Wikifier response: " + Excerpt(body));
  }
  if (!response.is_object() || !response.contains("annotations") ||
      !response["annotations"].is_array()) {
    throw Error(ErrorCode::kService,
                "Wikifier response has no annotations: " + Excerpt(body));
  }
  std::vector<TopicCandidate> out;
  for (const nlohmann::json& annotation : response["annotations"]) {
    if (!annotation.is_object() || !annotation.contains("title") ||
        !annotation["title"].is_string() ||
        !annotation.contains(ranking_field) ||
        !annotation[ranking_field].is_number()) {
      throw Error(ErrorCode::kService, "Wikifier annotation lacks title or '" +
                                           ranking_field +
                                           "': " + Excerpt(annotation.dump()));
    }
    std::string label = annotation["title"].get<std::string>();
    if (label.empty()) continue;
    out.push_back(TopicCandidate{
        .label = std::move(label),
        .confidence =
            std::clamp(annotation[ranking_field].get<double>(), 0.0, 1.0),
        .method = AnnotationMethod::kWikifier});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TopicCandidate& a, const TopicCandidate& b) {
                     if (a.confidence != b.confidence) {
                       return a.confidence > b.confidence;
                     }
                     return a.label < b.label;
                   });
  return out;
}

WikifierClient::WikifierClient(WikifierConfig config,
                               std::shared_ptr<HttpTransport> transport,
                               std::optional<ResponseCache> cache)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(std::move(cache)) {}

std::vector<TopicCandidate> WikifierClient::Wikify(std::string_view text) {
  if (Trim(text).empty()) {
    throw Error(ErrorCode::kPrecondition, "cannot wikify empty text");
  }
  return ParseWikifierResponse(Fetch(text), config_.ranking_field);
}

std::string WikifierClient::Fetch(std::string_view text) {
  const std::string key = ResponseCache::KeyFor(text);
  if (cache_) {
    if (std::optional<std::string> hit = cache_->Get(key)) {
      ++cache_hits_;
      return *std::move(hit);
    }
  }
  if (config_.endpoint.empty() || config_.credential.empty()) {
    throw Error(ErrorCode::kConfig,
                "Wikifier endpoint and credential are required");
  }
  if (!transport_) {
    throw Error(ErrorCode::kConfig, "no HTTP transport configured");
  }
  const FormFields form = {
      {"text", std::string(text)},
      {"lang", config_.language},
      {"userKey", config_.credential},
      {"pageRankSqThreshold", std::to_string(config_.page_rank_sq_threshold)},
      {"applyPageRankSqThreshold", "true"},
      {"support", "false"},
      {"ranges", "false"},
      {"includeCosines", "true"},
  };
  HttpResponse response;
  for (int attempt = 0;; ++attempt) {
    ++service_calls_;
    try {
      response = transport_->PostForm(config_.endpoint, form, config_.timeout);
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTransport || attempt >= config_.max_retries) {
        throw;
      }
    }
    std::this_thread::sleep_for(config_.retry_backoff * (attempt + 1));
  }
  if (response.status < 200 || response.status >= 300) {
    throw Error(ErrorCode::kService, "Wikifier returned HTTP " +
                                         std::to_string(response.status) +
                                         ": " + Excerpt(response.body));
  }
  // Validate before caching so a bad payload is never replayed.
  ParseWikifierResponse(response.body, config_.ranking_field);
  if (cache_) cache_->Put(key, response.body);
  return response.body;
}

}  // namespace tcsaug
