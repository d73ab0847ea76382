#include "agentic/websearch_agent.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <set>

#include "agentic/text_util.hpp"

namespace agentic {

namespace {

// Drops "1.", "2)", "-", "*", "•" style prefixes and surrounding quotes.
std::string clean_subquery(std::string_view line) {
  auto s = text::trim(line);
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')' || s[i] == ':')) {
    s = text::trim(s.substr(i + 1));
  } else if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
    s = text::trim(s.substr(1));
  } else if (s.starts_with("\xE2\x80\xA2")) {
    s = text::trim(s.substr(3));
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = text::trim(s.substr(1, s.size() - 2));
  return std::string(s);
}

std::string format_results(const std::vector<SearchResult>& results) {
  std::string out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (i > 0) out += "\n";
    out += "[" + std::to_string(i + 1) + "] " + r.title + "\n";
    out += "URL: " + r.url + "\n";
    out += r.snippet + "\n";
  }
  return out;
}

struct Retrieval {
  std::vector<SearchResult> results;
  std::optional<ProviderError> error;
};

Retrieval retrieve_with_retry(const std::string& subquery, SearchProvider& provider, const WebSearchOptions& options) {
  Retrieval out;
  for (int attempt = 0;; ++attempt) {
    try {
      out.results = retrieve(subquery, provider, options.top_k);
      out.error.reset();
      return out;
    } catch (const ProviderError& e) {
      out.error = e;
      if (e.kind() != ProviderErrorKind::Timeout || attempt >= options.provider_retries) return out;
    }
  }
}

}  // namespace

std::vector<std::string> decompose_query(const std::string& query, RoleChannel& channel, const PromptBook& prompts,
                                         bool thinking, std::size_t max_subqueries) {
  const auto user = prompts.render("search_decompose", {{"QUERY", query}, {"MAX", std::to_string(max_subqueries)}});
  const auto reply = channel.ask(AgentRole::WebSearch, prompts.system_prompt(AgentRole::WebSearch, true), user, thinking);

  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto line : text::split_lines(reply.content)) {
    if (out.size() >= max_subqueries) break;
    auto q = clean_subquery(line);
    if (q.empty() || !seen.insert(q).second) continue;
    out.push_back(std::move(q));
  }
  if (out.empty()) out.push_back(query);
  return out;
}

std::vector<SearchResult> retrieve(const std::string& subquery, SearchProvider& provider, std::size_t top_k) {
  auto results = provider.search(subquery);
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& a, const SearchResult& b) { return a.rank < b.rank; });
  if (results.size() > top_k) results.resize(top_k);
  return results;
}

std::string synthesize(const std::string& query, const std::vector<std::string>& subqueries,
                       const std::vector<SearchResult>& results, RoleChannel& channel, const PromptBook& prompts,
                       bool thinking) {
  (void)subqueries;
  if (results.empty()) return std::string(kNoResults);
  const auto user = prompts.render("search_synthesize", {{"QUERY", query}, {"RESULTS", format_results(results)}});
  const auto reply = channel.ask(AgentRole::WebSearch, prompts.system_prompt(AgentRole::WebSearch, true), user, thinking);
  auto passage = std::string(text::trim(reply.content));
  return passage.empty() ? std::string(kNoResults) : passage;
}

SearchOutcome run_web_search(const std::string& query, RoleChannel& channel, const PromptBook& prompts,
                             SearchProvider& provider, const WebSearchOptions& options, bool thinking) {
  SearchOutcome outcome;
  outcome.subqueries = decompose_query(query, channel, prompts, thinking, options.max_subqueries);

  std::vector<Retrieval> retrievals;
  if (outcome.subqueries.size() == 1) {
    retrievals.push_back(retrieve_with_retry(outcome.subqueries.front(), provider, options));
  } else {
    std::vector<std::future<Retrieval>> pending;
    for (const auto& sq : outcome.subqueries) {
      pending.push_back(std::async(std::launch::async,
                                   [&provider, &options, sq] { return retrieve_with_retry(sq, provider, options); }));
    }
    for (auto& f : pending) retrievals.push_back(f.get());
  }

  std::vector<SearchResult> merged;
  std::set<std::string> urls;
  std::size_t failures = 0;
  for (auto& r : retrievals) {
    if (r.error) {
      ++failures;
      if (!outcome.error) outcome.error = std::string(provider_error_name(r.error->kind()));
      continue;
    }
    for (auto& res : r.results) {
      if (!res.url.empty() && !urls.insert(res.url).second) continue;
      merged.push_back(std::move(res));
    }
  }

  if (failures == retrievals.size()) {
    outcome.observation = "SEARCH_FAILED: " + *outcome.error;
    return outcome;
  }
  outcome.observation = synthesize(query, outcome.subqueries, merged, channel, prompts, thinking);
  return outcome;
}

}  // namespace agentic
