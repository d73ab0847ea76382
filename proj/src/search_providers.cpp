#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "agentic/http_backend.hpp"
#include "agentic/trace_io.hpp"
#include "agentic/websearch_agent.hpp"

namespace agentic {

std::string_view provider_error_name(ProviderErrorKind kind) {
  switch (kind) {
    case ProviderErrorKind::Timeout:
      return "ProviderTimeout";
    case ProviderErrorKind::Quota:
      return "ProviderQuota";
    case ProviderErrorKind::Parse:
      return "ProviderParse";
  }
  return "ProviderParse";
}

ProviderError::ProviderError(ProviderErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(provider_error_name(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string string_member(const nlohmann::json& obj, std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    auto it = obj.find(k);
    if (it != obj.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

}  // namespace

FixtureSearchProvider::FixtureSearchProvider(const std::filesystem::path& dir) : dir_(dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::invalid_argument("search fixture directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto doc = nlohmann::json::parse(read_text_file(file), nullptr, false);
    auto fail = [&](const std::string& what) { throw std::invalid_argument(file.string() + ": " + what); };
    if (doc.is_discarded() || !doc.is_object()) fail("not a JSON object");
    if (!doc.contains("query") || !doc["query"].is_string()) fail("missing string \"query\"");
    if (!doc.contains("results") || !doc["results"].is_array()) fail("missing array \"results\"");
    const auto key = doc["query"].get<std::string>();
    if (entries_.contains(key)) fail("duplicate fixture key \"" + key + "\"");

    std::vector<SearchResult> results;
    std::set<int> ranks;
    int position = 0;
    for (const auto& r : doc["results"]) {
      ++position;
      if (!r.is_object()) fail("result entries must be objects");
      SearchResult res;
      res.title = string_member(r, {"title"});
      res.url = string_member(r, {"url"});
      res.snippet = string_member(r, {"snippet"});
      res.rank = position;
      if (auto it = r.find("rank"); it != r.end()) {
        if (!it->is_number_integer() || it->get<int>() < 1) fail("rank must be a positive integer");
        res.rank = it->get<int>();
      }
      if (!ranks.insert(res.rank).second) fail("duplicate rank " + std::to_string(res.rank));
      results.push_back(std::move(res));
    }
    entries_.emplace(key, std::move(results));
  }
}

std::vector<SearchResult> FixtureSearchProvider::search(const std::string& query) {
  auto it = entries_.find(query);
  if (it == entries_.end()) return {};
  return it->second;
}

LiveSearchProvider::LiveSearchProvider(LiveSearchOptions options) : options_(std::move(options)) {
  split_url(options_.endpoint);  // validates
}

std::vector<SearchResult> LiveSearchProvider::normalize(std::string_view body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ProviderError(ProviderErrorKind::Parse, "reply is not a JSON object");
  const nlohmann::json* list = nullptr;
  for (const char* key : {"results", "organic", "items"}) {
    if (auto it = doc.find(key); it != doc.end() && it->is_array()) {
      list = &*it;
      break;
    }
  }
  if (list == nullptr) {
    if (auto web = doc.find("web"); web != doc.end() && web->is_object()) {
      if (auto it = web->find("results"); it != web->end() && it->is_array()) list = &*it;
    }
  }
  if (list == nullptr) throw ProviderError(ProviderErrorKind::Parse, "no result array in reply");

  std::vector<SearchResult> out;
  int rank = 0;
  for (const auto& item : *list) {
    if (!item.is_object()) continue;
    SearchResult r;
    r.title = string_member(item, {"title", "name"});
    r.url = string_member(item, {"url", "link"});
    r.snippet = string_member(item, {"snippet", "description", "content"});
    if (r.url.empty() && r.snippet.empty()) continue;
    r.rank = ++rank;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SearchResult> LiveSearchProvider::search(const std::string& query) {
  const auto url = split_url(options_.endpoint);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    const bool bearer = options_.auth_header == "Authorization";
    headers.emplace(options_.auth_header, bearer ? "Bearer " + options_.api_key : options_.api_key);
  }
  httplib::Params params{{"q", query}, {"count", std::to_string(options_.count)}};
  auto result = client.Get(url.path.empty() ? "/" : url.path, params, headers);
  if (!result) throw ProviderError(ProviderErrorKind::Timeout, httplib::to_string(result.error()));
  if (result->status == 429 || result->status == 402 || result->status == 403) {
    throw ProviderError(ProviderErrorKind::Quota, "HTTP " + std::to_string(result->status));
  }
  if (result->status != 200) throw ProviderError(ProviderErrorKind::Parse, "HTTP " + std::to_string(result->status));
  return normalize(result->body);
}

std::unique_ptr<SearchProvider> make_search_provider(const SearchConfig& config, Millis timeout) {
  if (config.kind == SearchConfig::Kind::Fixture) return std::make_unique<FixtureSearchProvider>(config.fixture_dir);
  LiveSearchOptions options;
  options.endpoint = config.endpoint;
  if (const char* key = std::getenv(config.api_key_env.c_str())) options.api_key = key;
  options.auth_header = config.auth_header;
  options.count = config.top_k;
  options.timeout = timeout;
  return std::make_unique<LiveSearchProvider>(std::move(options));
}

}  // namespace agentic
