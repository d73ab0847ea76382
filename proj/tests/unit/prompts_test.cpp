#include <gtest/gtest.h>

#include <cstdlib>

#include "agentic/prompts.hpp"
#include "agentic/text_util.hpp"
#include "agentic/trace_io.hpp"
#include "test_support.hpp"

namespace agentic {
namespace {

const PromptBook& book() {
  static const PromptBook b = PromptBook::load_default();
  return b;
}

std::size_t occurrences(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

void expect_golden(const std::string& name, const std::string& actual) {
  const auto path = testing::golden_dir() / name;
  if (std::getenv("AGENTIC_UPDATE_GOLDEN") != nullptr) write_text_file(path, actual);
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(read_text_file(path), actual);
}

TEST(PromptBook, VersionIsPresent) { EXPECT_FALSE(text::trim(book().version()).empty()); }

TEST(PromptBook, MissingAssetDirectoryIsReported) {
  testing::TempDir dir;
  EXPECT_THROW(PromptBook::load(dir.path()), MissingPromptAsset);
}

TEST(PromptBook, PlannerWithoutToolsHasNoRoster) {
  const auto task = testing::make_task("t", 1, "3");
  const auto no_tools = build_role_prompt(book(), AgentRole::Planner, task, {}, false);
  const auto with_tools = build_role_prompt(book(), AgentRole::Planner, task, {}, true);
  for (const char* tool : {"web_search", "mind_map", "<tool_call>"}) {
    EXPECT_EQ(no_tools.text().find(tool), std::string::npos) << tool;
    EXPECT_NE(with_tools.text().find(tool), std::string::npos) << tool;
  }
  EXPECT_EQ(no_tools.user.find("No tool calls yet."), std::string::npos);
}

TEST(PromptBook, Deterministic) {
  const auto task = testing::make_task("t", 1, "3");
  const auto trace = testing::make_trace("t", {{AgentRole::WebSearch, "q"}}, "x");
  EXPECT_EQ(build_role_prompt(book(), AgentRole::Planner, task, trace.tool_calls, true).text(),
            build_role_prompt(book(), AgentRole::Planner, task, trace.tool_calls, true).text());
}

TEST(PromptBook, OneObservationBlockPerCallInOrder) {
  auto task = testing::make_task("asean", 2, "Indonesia, Myanmar");
  task.question = "Which 2 ASEAN countries have the furthest apart capitals?";
  auto trace = testing::make_trace("asean", {{AgentRole::WebSearch, "ASEAN member states and their geographical coordinates"}},
                                   "x");
  trace.tool_calls[0].observation = "Jakarta: -6.2088, 106.8456";
  const auto one = build_role_prompt(book(), AgentRole::Planner, task, trace.tool_calls, true);
  EXPECT_EQ(occurrences(one.user, "[End of observation"), 1u);
  expect_golden("planner_prompt_one_search.txt", one.text());

  auto two = testing::make_trace("asean", {{AgentRole::WebSearch, "a"}, {AgentRole::Coder, "b"}}, "x");
  const auto text = build_role_prompt(book(), AgentRole::Planner, task, two.tool_calls, true).user;
  EXPECT_EQ(occurrences(text, "[End of observation"), 2u);
  EXPECT_LT(text.find("[Tool call 1] web_search"), text.find("[Tool call 2] code"));
}

TEST(PromptBook, AttachmentsAreListed) {
  auto task = testing::make_task("t", 1, "3");
  task.attachments = {"/data/inventory.csv"};
  EXPECT_NE(build_role_prompt(book(), AgentRole::Planner, task, {}, false).user.find("- /data/inventory.csv"),
            std::string::npos);
}

TEST(PromptBook, ToolRolesGetOnlyTheirSystemPrompt) {
  const auto task = testing::make_task("t", 1, "3");
  for (auto role : kToolRoles) {
    const auto p = build_role_prompt(book(), role, task, {}, true);
    EXPECT_FALSE(p.system.empty());
    EXPECT_TRUE(p.user.empty());
  }
}

TEST(PromptBook, RenderFillsPlaceholders) {
  const auto text = book().render("search_decompose", {{"QUERY", "Moon perigee"}, {"MAX", "3"}});
  EXPECT_NE(text.find("Moon perigee"), std::string::npos);
  EXPECT_EQ(text.find("{{"), std::string::npos);
}

TEST(PromptBook, Reminders) {
  const auto soft = book().format_reminder("no final answer", false, true);
  const auto last = book().format_reminder("no final answer", true, true);
  EXPECT_NE(soft.find("no final answer"), std::string::npos);
  EXPECT_NE(soft, last);
}

TEST(StopWords, LoadsAsset) {
  const auto words = load_stop_words(default_assets_dir() / "stopwords.txt");
  EXPECT_TRUE(words.count("the"));
  EXPECT_FALSE(words.count("cuba"));
}

}  // namespace
}  // namespace agentic
