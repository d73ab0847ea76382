#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentic/core_types.hpp"
#include "agentic/model_gateway.hpp"
#include "agentic/prompts.hpp"

namespace agentic {

struct SearchResult {
  std::string title;
  std::string url;
  std::string snippet;
  int rank = 1;  // unique within one result set

  bool operator==(const SearchResult&) const = default;
};

enum class ProviderErrorKind { Timeout, Quota, Parse };

std::string_view provider_error_name(ProviderErrorKind kind);  // ProviderTimeout, ...

class ProviderError : public std::runtime_error {
 public:
  ProviderError(ProviderErrorKind kind, const std::string& message);
  ProviderErrorKind kind() const noexcept { return kind_; }

 private:
  ProviderErrorKind kind_;
};

class SearchProvider {
 public:
  virtual ~SearchProvider() = default;
  /// Results in provider order; may be more than the caller wants.
  virtual std::vector<SearchResult> search(const std::string& query) = 0;
  virtual std::string describe() const = 0;
};

/// Offline provider backed by a directory of JSON files, one per key:
///   {"query": "<exact sub-query>", "results": [{"title", "url", "snippet", "rank"?}, ...]}
/// Unknown keys yield no results.
class FixtureSearchProvider final : public SearchProvider {
 public:
  explicit FixtureSearchProvider(const std::filesystem::path& dir);

  std::vector<SearchResult> search(const std::string& query) override;
  std::string describe() const override { return "fixture:" + dir_.string(); }
  std::size_t key_count() const { return entries_.size(); }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::vector<SearchResult>, std::less<>> entries_;
};

struct LiveSearchOptions {
  std::string endpoint;  // GET <endpoint>?q=<query>&count=<k>
  std::string api_key;
  std::string auth_header = "Authorization";  // "Authorization" sends "Bearer <key>"
  std::size_t count = 5;
  Millis timeout{15000};
};

/// One HTTPS request per query. Understands the common JSON result layouts
/// ("results", "organic", "web.results", "items").
class LiveSearchProvider final : public SearchProvider {
 public:
  explicit LiveSearchProvider(LiveSearchOptions options);

  std::vector<SearchResult> search(const std::string& query) override;
  std::string describe() const override { return "live:" + options_.endpoint; }

  /// Throws ProviderError(Parse) when no known result array is present.
  static std::vector<SearchResult> normalize(std::string_view body);

 private:
  LiveSearchOptions options_;
};

std::unique_ptr<SearchProvider> make_search_provider(const SearchConfig& config, Millis timeout);

// ---------------------------------------------------------------------------
// Agent operations
// ---------------------------------------------------------------------------

/// One model call; one sub-query per reply line (numbering and bullets are
/// stripped). Falls back to {query} when nothing usable comes back.
std::vector<std::string> decompose_query(const std::string& query, RoleChannel& channel, const PromptBook& prompts,
                                         bool thinking, std::size_t max_subqueries);

/// Results for one sub-query, sorted by rank and cut to `top_k`.
std::vector<SearchResult> retrieve(const std::string& subquery, SearchProvider& provider, std::size_t top_k);

inline constexpr std::string_view kNoResults = "NO_RESULTS";

/// One model call condensing `results` into a passage, or NO_RESULTS without
/// a call when `results` is empty.
std::string synthesize(const std::string& query, const std::vector<std::string>& subqueries,
                       const std::vector<SearchResult>& results, RoleChannel& channel, const PromptBook& prompts,
                       bool thinking);

struct WebSearchOptions {
  std::size_t max_subqueries = 3;
  std::size_t top_k = 5;
  int provider_retries = 0;  // extra attempts after ProviderTimeout
};

struct SearchOutcome {
  std::string observation;
  std::optional<std::string> error;  // provider error tag, if any retrieval failed
  std::vector<std::string> subqueries;
};

/// decompose -> retrieve (sub-queries in parallel) -> synthesize. At most two
/// model calls.
SearchOutcome run_web_search(const std::string& query, RoleChannel& channel, const PromptBook& prompts,
                             SearchProvider& provider, const WebSearchOptions& options, bool thinking);

}  // namespace agentic
