#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentic/eval_harness.hpp"
#include "agentic/telemetry.hpp"

namespace agentic {

struct RunDirectory {
  std::filesystem::path path;
  std::vector<Trace> traces;  // sorted by task id
};

/// Reads every trace_*.json in `dir`. Throws TraceFormatError naming the bad
/// file and EmptyInput when there is none.
RunDirectory load_run_dir(const std::filesystem::path& dir);

/// task_id -> predicted answer, from a run directory or from a flat JSON
/// object file {"<task_id>": "<answer>", ...}.
std::map<std::string, std::string> load_predictions(const std::filesystem::path& path);

class OrphanPredictions : public std::runtime_error {
 public:
  OrphanPredictions(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

/// Judges every prediction against its task. Throws OrphanPredictions when a
/// prediction has no task.
std::vector<Verdict> judge_predictions(const std::map<std::string, std::string>& predictions,
                                       const std::vector<Task>& tasks);

struct ConfigLabel {
  std::string model;
  std::string config;    // Agentic | No-Tools
  std::string thinking;  // NO | PLANNER | YES
};

ConfigLabel config_label(const RunConfig& config);

struct AccuracyRow {
  ConfigLabel label;
  AccuracyReport report;
};

/// Markdown table: | Model | Config | Thinking | ACC | L1 | L2 | L3 |
std::string render_markdown_table(const std::vector<AccuracyRow>& rows);
/// The same columns padded for a terminal.
std::string render_aligned_table(const std::vector<AccuracyRow>& rows);

struct AnalysisOutput {
  std::vector<AccuracyRow> accuracy;
  std::vector<ToolUsageStats> usage;
  std::vector<PairedFinding> pairs;  // empty unless two runs were given
};

/// Writes report.md, usage_by_config.csv, usage_by_level.csv,
/// accuracy_calls_by_level.csv, labels.csv and (for paired runs) pairs.jsonl
/// into `out_dir`. With two runs the first is the no-thinking side.
AnalysisOutput analyze_runs(const std::vector<RunDirectory>& runs, const std::vector<Task>& tasks,
                            const std::filesystem::path& out_dir, const TelemetryThresholds& thresholds = {});

/// RFC 4180 field quoting.
std::string csv_field(std::string_view value);

}  // namespace agentic
