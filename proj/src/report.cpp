#include "agentic/report.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace agentic {

OrphanPredictions::OrphanPredictions(std::vector<std::string> ids)
    : std::runtime_error([&] {
        std::string msg = "predictions without a matching task:";
        for (const auto& id : ids) msg += " " + id;
        return msg;
      }()),
      ids_(std::move(ids)) {}

RunDirectory load_run_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("run directory not found: " + dir.string());
  RunDirectory run;
  run.path = dir;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.starts_with("trace_") && name.ends_with(".json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) run.traces.push_back(read_trace_file(f));
  if (run.traces.empty()) throw EmptyInput("no trace files in " + dir.string());
  std::sort(run.traces.begin(), run.traces.end(),
            [](const Trace& a, const Trace& b) { return a.task_id < b.task_id; });
  return run;
}

std::map<std::string, std::string> load_predictions(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  if (std::filesystem::is_directory(path)) {
    for (const auto& t : load_run_dir(path).traces) out[t.task_id] = t.predicted_answer;
    return out;
  }
  if (!std::filesystem::is_regular_file(path)) throw std::invalid_argument("predictions not found: " + path.string());
  auto doc = Json::parse(read_text_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw TraceFormatError(path.string() + ": expected a JSON object of task_id -> answer");
  }
  for (const auto& [id, v] : doc.items()) {
    if (!v.is_string()) throw TraceFormatError(path.string() + ": answer for '" + id + "' must be a string");
    out[id] = v.get<std::string>();
  }
  if (out.empty()) throw EmptyInput("no predictions in " + path.string());
  return out;
}

std::vector<Verdict> judge_predictions(const std::map<std::string, std::string>& predictions,
                                       const std::vector<Task>& tasks) {
  std::unordered_map<std::string, const Task*> by_id;
  for (const auto& t : tasks) by_id.emplace(t.id, &t);
  std::vector<std::string> orphans;
  std::vector<Verdict> verdicts;
  for (const auto& [id, predicted] : predictions) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      orphans.push_back(id);
      continue;
    }
    verdicts.push_back(judge(*it->second, predicted));
  }
  if (!orphans.empty()) throw OrphanPredictions(std::move(orphans));
  return verdicts;
}

ConfigLabel config_label(const RunConfig& config) {
  return {config.backend.model, config.tools_enabled ? "Agentic" : "No-Tools",
          std::string(policy_table_label(config.thinking))};
}

namespace {

std::vector<std::vector<std::string>> table_cells(const std::vector<AccuracyRow>& rows) {
  std::vector<std::vector<std::string>> cells{{"Model", "Config", "Thinking", "ACC", "L1", "L2", "L3"}};
  for (const auto& r : rows) {
    cells.push_back({r.label.model, r.label.config, r.label.thinking, r.report.acc_text(), r.report.level_text(1),
                     r.report.level_text(2), r.report.level_text(3)});
  }
  return cells;
}

std::string label_prefix(const ConfigLabel& l) {
  return csv_field(l.model) + "," + csv_field(l.config) + "," + csv_field(l.thinking);
}

}  // namespace

std::string render_markdown_table(const std::vector<AccuracyRow>& rows) {
  const auto cells = table_cells(rows);
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    out += "|";
    for (const auto& c : cells[r]) out += " " + c + " |";
    out += "\n";
    if (r == 0) out += "|---|---|---|---:|---:|---:|---:|\n";
  }
  return out;
}

std::string render_aligned_table(const std::vector<AccuracyRow>& rows) {
  const auto cells = table_cells(rows);
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const auto pad = std::string(width[i] - row[i].size(), ' ');
      // Text columns left aligned, numbers right aligned.
      line += i < 3 ? row[i] + pad : pad + row[i];
      if (i + 1 < row.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

AnalysisOutput analyze_runs(const std::vector<RunDirectory>& runs, const std::vector<Task>& tasks,
                            const std::filesystem::path& out_dir, const TelemetryThresholds& thresholds) {
  if (runs.empty()) throw EmptyInput("no runs to analyze");
  std::unordered_map<std::string, const Task*> by_id;
  for (const auto& t : tasks) by_id.emplace(t.id, &t);

  AnalysisOutput output;
  std::string usage_cfg =
      "model,config,thinking,traces,web_search,code,mind_map,total,web_search_share,code_share,mind_map_share\n";
  std::string usage_lvl = "model,config,thinking,level,traces,web_search,code,mind_map,total\n";
  std::string acc_lvl = "model,config,thinking,level,n,correct,acc,mean_tool_calls\n";
  std::string labels = "model,config,thinking,task_id,correct,label,evidence\n";
  std::vector<std::unordered_map<std::string, bool>> correctness(runs.size());

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    const auto label = config_label(run.traces.front().config_snapshot);
    const auto prefix = label_prefix(label);

    std::map<std::string, std::string> predictions;
    for (const auto& t : run.traces) predictions[t.task_id] = t.predicted_answer;
    const auto verdicts = judge_predictions(predictions, tasks);
    for (const auto& v : verdicts) correctness[r][v.task_id] = v.correct;
    output.accuracy.push_back({label, aggregate(verdicts, tasks)});

    const auto usage = usage_stats(run.traces, tasks);
    usage_cfg += prefix + "," + std::to_string(usage.traces) + "," +
                 std::to_string(usage.counts.at(AgentRole::WebSearch)) + "," +
                 std::to_string(usage.counts.at(AgentRole::Coder)) + "," +
                 std::to_string(usage.counts.at(AgentRole::MindMap)) + "," + std::to_string(usage.total_calls) + "," +
                 usage.share_text(AgentRole::WebSearch) + "," + usage.share_text(AgentRole::Coder) + "," +
                 usage.share_text(AgentRole::MindMap) + "\n";
    for (const auto& [level, counts] : usage.per_level) {
      std::size_t total = 0;
      for (const auto& [role, n] : counts) total += n;
      usage_lvl += prefix + "," + std::to_string(level) + "," + std::to_string(usage.traces_per_level.at(level)) +
                   "," + std::to_string(counts.at(AgentRole::WebSearch)) + "," +
                   std::to_string(counts.at(AgentRole::Coder)) + "," + std::to_string(counts.at(AgentRole::MindMap)) +
                   "," + std::to_string(total) + "\n";
      const auto& lc = output.accuracy.back().report.per_level.at(level);
      std::ostringstream mean;
      mean.setf(std::ios::fixed);
      mean.precision(2);
      mean << static_cast<double>(total) / static_cast<double>(lc.n);
      acc_lvl += prefix + "," + std::to_string(level) + "," + std::to_string(lc.n) + "," + std::to_string(lc.correct) +
                 "," + format_hundredths(percent_hundredths(lc.correct, lc.n)) + "," + mean.str() + "\n";
    }
    output.usage.push_back(usage);

    for (const auto& trace : run.traces) {
      const auto fl = classify_trace(trace, *by_id.at(trace.task_id), thresholds);
      labels += prefix + "," + csv_field(trace.task_id) + "," + (correctness[r][trace.task_id] ? "true" : "false") +
                "," + std::string(failure_kind_name(fl.kind)) + "," + csv_field(fl.evidence) + "\n";
    }
  }

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "report.md", "# Accuracy\n\n" + render_markdown_table(output.accuracy));
  write_text_file(out_dir / "usage_by_config.csv", usage_cfg);
  write_text_file(out_dir / "usage_by_level.csv", usage_lvl);
  write_text_file(out_dir / "accuracy_calls_by_level.csv", acc_lvl);
  write_text_file(out_dir / "labels.csv", labels);

  if (runs.size() == 2) {
    std::unordered_map<std::string, const Trace*> t_side;
    for (const auto& t : runs[1].traces) t_side.emplace(t.task_id, &t);
    std::string jsonl;
    for (const auto& nt : runs[0].traces) {
      auto it = t_side.find(nt.task_id);
      if (it == t_side.end()) continue;
      auto finding = classify_pair(nt, *it->second, *by_id.at(nt.task_id), correctness[0][nt.task_id],
                                   correctness[1][nt.task_id], thresholds);
      jsonl += to_json(finding).dump() + "\n";
      output.pairs.push_back(std::move(finding));
    }
    write_text_file(out_dir / "pairs.jsonl", jsonl);
  }
  return output;
}

}  // namespace agentic
