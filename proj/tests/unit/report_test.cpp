#include <gtest/gtest.h>

#include "agentic/report.hpp"
#include "test_support.hpp"

namespace agentic {
namespace {

AccuracyRow row(std::string thinking, std::size_t c1, std::size_t c2, std::size_t c3) {
  return {{"32B", "Agentic", std::move(thinking)},
          report_from_counts(c1 + c2 + c3, 165, {{1, {c1, 53}}, {2, {c2, 86}}, {3, {c3, 26}}})};
}

TEST(Report, MarkdownTable) {
  const auto md = render_markdown_table({row("NO", 19, 20, 3)});
  EXPECT_EQ(md,
            "| Model | Config | Thinking | ACC | L1 | L2 | L3 |\n"
            "|---|---|---|---:|---:|---:|---:|\n"
            "| 32B | Agentic | NO | 25.45 | 35.85 | 23.26 | 11.54 |\n");
}

TEST(Report, AlignedTable) {
  const auto text = render_aligned_table({row("NO", 19, 20, 3), row("PLANNER", 18, 13, 3)});
  EXPECT_NE(text.find("32B    Agentic  NO        25.45  35.85  23.26  11.54"), std::string::npos) << text;
}

TEST(Report, CsvQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Report, LoadPredictionsFlatFile) {
  testing::TempDir dir;
  write_text_file(dir / "p.json", R"({"a": "1", "b": "2"})");
  EXPECT_EQ(load_predictions(dir / "p.json").size(), 2u);
  write_text_file(dir / "bad.json", R"({"a": 1})");
  EXPECT_THROW(load_predictions(dir / "bad.json"), TraceFormatError);
}

TEST(Report, OrphansAreListed) {
  try {
    judge_predictions({{"ghost", "1"}, {"t", "1"}}, {testing::make_task("t", 1, "1")});
    FAIL();
  } catch (const OrphanPredictions& e) {
    EXPECT_EQ(e.ids(), std::vector<std::string>{"ghost"});
  }
}

TEST(Report, EmptyRunDirectory) {
  testing::TempDir dir;
  EXPECT_THROW(load_run_dir(dir.path()), EmptyInput);
}

TEST(Report, AnalyzeWritesAllArtifacts) {
  testing::TempDir nt_dir, t_dir, out;
  auto nt = testing::make_trace("towers", {{AgentRole::Coder, "count towers"}}, "3");
  auto t = testing::make_trace("towers", {}, "0");
  t.config_snapshot.thinking = ThinkingPolicy::Full;
  write_trace_file(nt_dir.path(), nt);
  write_trace_file(t_dir.path(), t);
  const auto result = analyze_runs({load_run_dir(nt_dir.path()), load_run_dir(t_dir.path())},
                                   {testing::make_task("towers", 1, "3")}, out.path());
  for (const char* f : {"report.md", "usage_by_config.csv", "usage_by_level.csv", "accuracy_calls_by_level.csv",
                        "labels.csv", "pairs.jsonl"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  ASSERT_EQ(result.pairs.size(), 1u);
  EXPECT_EQ(result.pairs[0].primary_label, "ToolOmission");
  const auto usage = read_text_file(out / "usage_by_config.csv");
  EXPECT_NE(usage.find("default,Agentic,NO,1,0,1,0,1,0.0,100.0,0.0"), std::string::npos) << usage;
}

TEST(Report, SingleRunHasNoPairs) {
  testing::TempDir run, out;
  write_trace_file(run.path(), testing::make_trace("a", {{AgentRole::WebSearch, "q"}}, "x"));
  const auto result = analyze_runs({load_run_dir(run.path())}, {testing::make_task("a", 1, "x")}, out.path());
  EXPECT_TRUE(result.pairs.empty());
  EXPECT_FALSE(std::filesystem::exists(out / "pairs.jsonl"));
  EXPECT_EQ(result.usage.front().share_text(AgentRole::WebSearch), "100.0");
}

}  // namespace
}  // namespace agentic
