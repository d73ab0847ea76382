#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "agentic/prompts.hpp"
#include "agentic/scripted_backend.hpp"
#include "agentic/websearch_agent.hpp"
#include "test_support.hpp"

namespace agentic {
namespace {

const PromptBook& book() {
  static const PromptBook b = PromptBook::load_default();
  return b;
}

class MapProvider final : public SearchProvider {
 public:
  std::map<std::string, std::vector<SearchResult>> results;
  std::map<std::string, ProviderErrorKind> failures;
  std::atomic<int> calls{0};

  std::vector<SearchResult> search(const std::string& query) override {
    ++calls;
    if (auto f = failures.find(query); f != failures.end()) throw ProviderError(f->second, "scripted failure");
    auto it = results.find(query);
    return it == results.end() ? std::vector<SearchResult>{} : it->second;
  }
  std::string describe() const override { return "map"; }
};

struct Harness {
  std::vector<std::string> user_messages;
  std::unique_ptr<ModelGateway> gateway;
  std::unique_ptr<RoleChannel> channel;

  explicit Harness(std::vector<std::string> replies) {
    auto queue = std::make_shared<std::vector<std::string>>(std::move(replies));
    auto next = std::make_shared<std::size_t>(0);
    gateway = std::make_unique<ModelGateway>(std::make_unique<testing::LambdaBackend>(
        [this, queue, next](const ChatRequest& r) -> ChatResponse {
          user_messages.push_back(r.messages.back().content);
          if (*next >= queue->size()) throw GatewayError(GatewayErrorKind::ScriptExhausted, "no reply");
          return testing::reply((*queue)[(*next)++]);
        }));
    channel = std::make_unique<RoleChannel>(*gateway, SamplingDefaults{});
  }
};

std::vector<SearchResult> numbered(const std::string& prefix, int n) {
  std::vector<SearchResult> out;
  for (int i = n; i >= 1; --i) {
    out.push_back({prefix + " " + std::to_string(i), "https://example.org/" + prefix + std::to_string(i), "snippet",
                   i});
  }
  return out;
}

TEST(Decompose, ThreeLinesInOrder) {
  Harness h({"1. Eliud Kipchoge marathon world record time\n2) Moon perigee distance Wikipedia\n- Kipchoge pace km/h"});
  const auto subs = decompose_query("q", *h.channel, book(), false, 3);
  EXPECT_EQ(subs, (std::vector<std::string>{"Eliud Kipchoge marathon world record time", "Moon perigee distance Wikipedia",
                                            "Kipchoge pace km/h"}));
}

TEST(Decompose, EmptyReplyFallsBackToQuery) {
  const std::string q = "ASEAN member states and their geographical coordinates";
  Harness h({"\n\n"});
  EXPECT_EQ(decompose_query(q, *h.channel, book(), false, 3), std::vector<std::string>{q});
  EXPECT_NE(h.user_messages.front().find(q), std::string::npos);
}

TEST(Decompose, CapsAndDeduplicates) {
  Harness h({"a\na\nb\nc\nd"});
  EXPECT_EQ(decompose_query("q", *h.channel, book(), false, 3), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Retrieve, FixtureKeyedQuery) {
  FixtureSearchProvider provider(testing::fixtures_dir() / "asean" / "search");
  EXPECT_EQ(provider.key_count(), 1u);
  EXPECT_EQ(retrieve("ASEAN member states and their geographical coordinates", provider, 5).size(), 2u);
  EXPECT_TRUE(retrieve("unkeyed sub-query", provider, 5).empty());
}

TEST(Retrieve, PerigeeFixtureAndTruncation) {
  testing::TempDir dir;
  write_text_file(dir / "perigee.json", R"({"query": "minimum perigee of the moon wikipedia", "results": [
    {"title": "Moon - Wikipedia", "url": "https://en.wikipedia.org/wiki/Moon", "snippet": "Perigee 356400 km"},
    {"title": "Lunar distance", "url": "https://en.wikipedia.org/wiki/Lunar_distance", "snippet": "356352.93 km"}]})");
  std::string many = R"({"query": "nine", "results": [)";
  for (int i = 9; i >= 1; --i) {
    many += R"({"title": "r)" + std::to_string(i) + R"(", "url": "u)" + std::to_string(i) + R"(", "snippet": "s", "rank": )" +
            std::to_string(i) + "}" + (i > 1 ? "," : "");
  }
  write_text_file(dir / "nine.json", many + "]}");
  FixtureSearchProvider provider(dir.path());
  const auto perigee = retrieve("minimum perigee of the moon wikipedia", provider, 5);
  ASSERT_EQ(perigee.size(), 2u);
  EXPECT_EQ(perigee[0].rank, 1);
  const auto top = retrieve("nine", provider, 5);
  ASSERT_EQ(top.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(top[static_cast<std::size_t>(i)].rank, i + 1);
}

TEST(FixtureSearchProvider, RejectsDuplicates) {
  testing::TempDir dir;
  write_text_file(dir / "a.json", R"({"query": "q", "results": []})");
  write_text_file(dir / "b.json", R"({"query": "q", "results": []})");
  EXPECT_THROW(FixtureSearchProvider{dir.path()}, std::invalid_argument);
  testing::TempDir ranks;
  write_text_file(ranks / "a.json",
                  R"({"query": "q", "results": [{"title": "t", "url": "u", "snippet": "s", "rank": 1},
                                                 {"title": "t", "url": "v", "snippet": "s", "rank": 1}]})");
  EXPECT_THROW(FixtureSearchProvider{ranks.path()}, std::invalid_argument);
  EXPECT_THROW(FixtureSearchProvider{dir / "missing"}, std::invalid_argument);
}

TEST(Synthesize, ZeroResultsMakesNoCall) {
  Harness h({});
  EXPECT_EQ(synthesize("q", {"q"}, {}, *h.channel, book(), false), kNoResults);
  EXPECT_TRUE(h.user_messages.empty());
}

TEST(Synthesize, PassageVerbatim) {
  Harness h({"Bartlomiej Kasprzykowski played Wojciech"});
  const auto passage = synthesize("Bartlomiej Kasprzykowski role in Magda M.", {"x"}, numbered("r", 1), *h.channel,
                                  book(), false);
  EXPECT_EQ(passage, "Bartlomiej Kasprzykowski played Wojciech");
}

TEST(Synthesize, ContradictorySnippetsBothReachTheModel) {
  Harness h({"Sources disagree: one says 356,400 km [1], another 356,352.93 km [2]."});
  std::vector<SearchResult> results{{"A", "https://a", "Perigee is 356,400 km", 1},
                                    {"B", "https://b", "Perigee is 356,352.93 km", 2}};
  const auto passage = synthesize("moon perigee", {"moon perigee"}, results, *h.channel, book(), false);
  EXPECT_NE(h.user_messages.front().find("356,400"), std::string::npos);
  EXPECT_NE(h.user_messages.front().find("356,352.93"), std::string::npos);
  EXPECT_NE(passage.find("356,400"), std::string::npos);
  EXPECT_NE(passage.find("356,352.93"), std::string::npos);
}

TEST(RunWebSearch, ParallelSubqueriesMergeByUrl) {
  MapProvider provider;
  provider.results["a"] = {{"A", "https://same", "s", 1}};
  provider.results["b"] = {{"B", "https://same", "s", 1}, {"C", "https://other", "s", 2}};
  Harness h({"a\nb", "summary"});
  const auto out = run_web_search("q", *h.channel, book(), provider, {}, false);
  EXPECT_EQ(out.observation, "summary");
  EXPECT_EQ(out.subqueries.size(), 2u);
  EXPECT_EQ(provider.calls.load(), 2);
  ASSERT_EQ(h.user_messages.size(), 2u);
  EXPECT_NE(h.user_messages[1].find("https://other"), std::string::npos);
  EXPECT_EQ(h.user_messages[1].find("[3]"), std::string::npos);
}

TEST(RunWebSearch, AllProvidersFailing) {
  MapProvider provider;
  provider.failures["a"] = ProviderErrorKind::Quota;
  Harness h({"a"});
  const auto out = run_web_search("q", *h.channel, book(), provider, {}, false);
  EXPECT_EQ(out.observation, "SEARCH_FAILED: ProviderQuota");
  EXPECT_EQ(out.error, "ProviderQuota");
}

TEST(RunWebSearch, TimeoutsAreRetried) {
  struct Flaky final : SearchProvider {
    int calls = 0;
    std::vector<SearchResult> search(const std::string&) override {
      if (++calls == 1) throw ProviderError(ProviderErrorKind::Timeout, "slow");
      return {{"t", "u", "s", 1}};
    }
    std::string describe() const override { return "flaky"; }
  } provider;
  Harness h({"a", "passage"});
  WebSearchOptions options;
  options.provider_retries = 1;
  const auto out = run_web_search("q", *h.channel, book(), provider, options, false);
  EXPECT_EQ(out.observation, "passage");
  EXPECT_FALSE(out.error.has_value());
  EXPECT_EQ(provider.calls, 2);
}

TEST(RunWebSearch, PartialFailureStillSynthesizes) {
  MapProvider provider;
  provider.failures["a"] = ProviderErrorKind::Parse;
  provider.results["b"] = {{"B", "https://b", "s", 1}};
  Harness h({"a\nb", "passage"});
  const auto out = run_web_search("q", *h.channel, book(), provider, {}, false);
  EXPECT_EQ(out.observation, "passage");
  EXPECT_EQ(out.error, "ProviderParse");
}

TEST(LiveSearchProvider, NormalizesCommonLayouts) {
  EXPECT_EQ(LiveSearchProvider::normalize(R"({"results": [{"title": "t", "url": "u", "snippet": "s"}]})").size(), 1u);
  EXPECT_EQ(LiveSearchProvider::normalize(R"({"organic": [{"title": "t", "link": "u", "snippet": "s"}]})").size(), 1u);
  EXPECT_EQ(LiveSearchProvider::normalize(R"({"web": {"results": [{"title": "t", "url": "u", "description": "s"}]}})")
                .size(),
            1u);
  EXPECT_THROW(LiveSearchProvider::normalize(R"({"nothing": 1})"), ProviderError);
}

TEST(LiveSearchProvider, LocalServerAndQuota) {
  httplib::Server server;
  const int port = server.bind_to_any_port("127.0.0.1");
  std::string seen_query, seen_auth;
  int status = 200;
  server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
    seen_query = req.get_param_value("q");
    seen_auth = req.get_header_value("Authorization");
    res.status = status;
    res.set_content(R"({"results": [{"title": "Moon", "url": "https://moon", "snippet": "356400 km"}]})",
                    "application/json");
  });
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  LiveSearchProvider provider({"http://127.0.0.1:" + std::to_string(port) + "/search", "key", "Authorization", 5,
                               Millis{5000}});
  const auto results = provider.search("moon perigee");
  status = 429;
  ProviderErrorKind kind = ProviderErrorKind::Parse;
  try {
    provider.search("again");
  } catch (const ProviderError& e) {
    kind = e.kind();
  }
  server.stop();
  t.join();
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].url, "https://moon");
  EXPECT_EQ(seen_query, "again");
  EXPECT_EQ(seen_auth, "Bearer key");
  EXPECT_EQ(kind, ProviderErrorKind::Quota);
}

}  // namespace
}  // namespace agentic
