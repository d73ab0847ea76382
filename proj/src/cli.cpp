#include "agentic/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "agentic/controller.hpp"
#include "agentic/eval_harness.hpp"
#include "agentic/report.hpp"
#include "agentic/scripted_backend.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

namespace {

struct RunOptions {
  std::string config;
  std::string dataset;
  std::string out;
  std::string backend;
  std::string tools;
  std::string thinking;
  int max_tool_calls = 0;
  std::size_t limit = 0;
  int level = 0;
  std::vector<std::string> task_ids;
  int workers = 4;
  bool keep_sandbox = false;
  bool dump_mindmap = false;
};

struct ScoreOptions {
  std::string predictions;
  std::string dataset;
};

struct AnalyzeOptions {
  std::string run_dir;
  std::string paired;
  std::string dataset;
  std::string out;
};

struct Cli {
  CLI::App app{"Plan-act agent harness: run tasks, score answers, analyze traces.", "agentic"};
  CLI::App* run = nullptr;
  CLI::App* score = nullptr;
  CLI::App* analyze = nullptr;
  CLI::Option* max_tool_calls = nullptr;
  RunOptions run_opts;
  ScoreOptions score_opts;
  AnalyzeOptions analyze_opts;

  Cli() {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    run = app.add_subcommand("run", "Run every selected task and write one trace per task plus a manifest");
    run->add_option("--config", run_opts.config, "JSON run configuration (file < environment < flags)");
    run->add_option("--dataset", run_opts.dataset, "Task file, one JSON record per line");
    run->add_option("--out", run_opts.out, "Output directory for traces and manifest.json")->required();
    run->add_option("--backend", run_opts.backend, "Model backend: scripted:<path> or http:<url>");
    run->add_option("--tools", run_opts.tools, "Enable the tool agents")->check(CLI::IsMember({"on", "off"}));
    run->add_option("--thinking", run_opts.thinking, "Thinking policy")
        ->check(CLI::IsMember({"none", "planner", "full"}));
    max_tool_calls = run->add_option("--max-tool-calls", run_opts.max_tool_calls, "Tool-call budget per task")
                         ->check(CLI::PositiveNumber);
    run->add_option("--limit", run_opts.limit, "Run at most N tasks (after filtering)");
    run->add_option("--level", run_opts.level, "Only tasks of this level")->check(CLI::Range(1, 9));
    run->add_option("--task-id", run_opts.task_ids, "Only these task ids (repeatable)");
    run->add_option("--workers", run_opts.workers, "Concurrent tasks (scripted backends always use 1)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    run->add_flag("--keep-sandbox", run_opts.keep_sandbox, "Keep code-execution temp directories");
    run->add_flag("--dump-mindmap", run_opts.dump_mindmap, "Write each task's knowledge graph to mindmap/");

    score = app.add_subcommand("score", "Score predictions against a dataset and print the accuracy table");
    score->add_option("predictions", score_opts.predictions, "Run directory or JSON file {task_id: answer}")
        ->required();
    score->add_option("--dataset", score_opts.dataset, "Task file with gold answers")->required();

    analyze = app.add_subcommand("analyze", "Compute tool usage, failure labels and paired findings");
    analyze->add_option("run_dir", analyze_opts.run_dir, "Run directory")->required();
    analyze->add_option("--paired", analyze_opts.paired, "Second run directory (thinking side of each pair)");
    analyze->add_option("--dataset", analyze_opts.dataset, "Task file with gold answers")->required();
    analyze->add_option("--out", analyze_opts.out, "Directory for report.md, CSV files and pairs.jsonl")->required();
  }
};

RunConfig effective_config(const Cli& cli, const EnvLookup& env, FixtureBundle& bundle) {
  const auto& o = cli.run_opts;
  std::string backend_spec = o.backend;
  if (backend_spec.empty()) {
    if (auto v = env("AGENTIC_BACKEND")) backend_spec = *v;
  }
  bundle = find_fixture_bundle(backend_spec);

  RunConfig config;
  if (!o.config.empty()) {
    config = load_config_file(o.config, config);
  } else if (bundle.config) {
    config = load_config_file(*bundle.config, config);
  }
  config = apply_env(std::move(config), env);

  ConfigOverrides flags;
  if (!o.backend.empty()) flags.backend = o.backend;
  if (!o.tools.empty()) flags.tools_enabled = parse_switch(o.tools, "--tools");
  if (!o.thinking.empty()) flags.thinking = policy_from_name(o.thinking);
  if (cli.max_tool_calls->count() > 0) flags.max_tool_calls = o.max_tool_calls;
  if (o.keep_sandbox) flags.keep_sandbox = true;
  config = apply_overrides(std::move(config), flags);

  if (config.search.kind == SearchConfig::Kind::Fixture && config.search.fixture_dir.empty() && bundle.search_dir) {
    config.search.fixture_dir = bundle.search_dir->string();
  }
  validate(config);
  return config;
}

std::vector<Task> select_tasks(std::vector<Task> tasks, const RunOptions& o) {
  std::vector<Task> out;
  for (auto& t : tasks) {
    if (o.level != 0 && t.level != o.level) continue;
    if (!o.task_ids.empty() && std::find(o.task_ids.begin(), o.task_ids.end(), t.id) == o.task_ids.end()) continue;
    out.push_back(std::move(t));
  }
  if (o.limit > 0 && out.size() > o.limit) out.resize(o.limit);
  return out;
}

Json manifest_entry(const Trace& trace) {
  Json calls;
  for (auto role : kToolRoles) calls[std::string(role_name(role))] = trace.count_calls(role);
  return Json{{"task_id", trace.task_id},
              {"terminated_by", termination_name(trace.terminated_by)},
              {"predicted_answer", trace.predicted_answer},
              {"tool_calls", calls},
              {"trace_file", trace_file_name(trace.task_id)}};
}

int cmd_run(const Cli& cli, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  const auto& o = cli.run_opts;
  FixtureBundle bundle;
  const auto config = effective_config(cli, env, bundle);

  std::string dataset_path = o.dataset;
  if (dataset_path.empty() && bundle.dataset) dataset_path = bundle.dataset->string();
  if (dataset_path.empty()) throw ValidationError("--dataset is required");
  auto tasks = select_tasks(load_dataset(dataset_path), o);
  if (tasks.empty()) throw ValidationError("no tasks selected from " + dataset_path);

  const auto hist = level_histogram(tasks);
  err << "loaded " << tasks.size() << " tasks from " << dataset_path << " (levels:";
  for (const auto& [level, n] : hist) err << " " << level << "=" << n;
  err << ")\n";

  const auto prompts = PromptBook::load(resolve_assets_dir(config.assets_dir) / "prompts");
  ModelGateway gateway(make_backend(config, env), gateway_options(config));
  std::optional<ToolSuite> tools;
  if (config.tools_enabled) tools = make_tool_suite(config);

  // Replies of a scripted backend are consumed in order, so its tasks must
  // not interleave.
  const auto workers = config.backend.kind == BackendConfig::Kind::Scripted
                           ? std::size_t{1}
                           : std::min<std::size_t>(static_cast<std::size_t>(o.workers), tasks.size());

  const std::filesystem::path out_dir(o.out);
  std::filesystem::create_directories(out_dir);
  std::vector<Trace> traces(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
      auto result = run_task(tasks[i], config, gateway, prompts, tools ? &*tools : nullptr);
      write_trace_file(out_dir, result.trace);
      if (o.dump_mindmap) {
        auto name = trace_file_name(tasks[i].id);
        name.replace(0, std::string_view("trace_").size(), "mindmap_");
        write_text_file(out_dir / "mindmap" / name, result.mindmap.to_json().dump(2) + "\n");
      }
      {
        std::lock_guard lock(log_mutex);
        err << "[" << tasks[i].id << "] " << termination_name(result.trace.terminated_by) << ": "
            << result.trace.predicted_answer << "\n";
      }
      traces[i] = std::move(result.trace);
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Json manifest;
  manifest["effective_config"] = to_json(config);
  manifest["prompts_version"] = prompts.version();
  manifest["dataset"] = dataset_path;
  manifest["tasks"] = Json::array();
  std::size_t backend_errors = 0;
  Json totals;
  for (auto role : kToolRoles) totals[std::string(role_name(role))] = 0;
  for (const auto& trace : traces) {
    manifest["tasks"].push_back(manifest_entry(trace));
    for (auto role : kToolRoles) {
      totals[std::string(role_name(role))] = totals[std::string(role_name(role))].get<std::size_t>() +
                                             trace.count_calls(role);
    }
    backend_errors += trace.terminated_by == Termination::BackendError;
  }
  manifest["tool_call_totals"] = totals;
  manifest["backend_errors"] = backend_errors;
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  out << "wrote " << traces.size() << " traces to " << out_dir.string() << "\n";
  if (backend_errors > 0) {
    err << backend_errors << " task(s) ended with a backend error\n";
    return kExitBackendErrors;
  }
  return kExitOk;
}

int cmd_score(const Cli& cli, std::ostream& out, std::ostream& err) {
  const auto& o = cli.score_opts;
  const auto tasks = load_dataset(o.dataset);
  const auto predictions = load_predictions(o.predictions);
  std::vector<Verdict> verdicts;
  try {
    verdicts = judge_predictions(predictions, tasks);
  } catch (const OrphanPredictions& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  ConfigLabel label{"predictions", "-", "-"};
  if (std::filesystem::is_directory(o.predictions)) {
    label = config_label(load_run_dir(o.predictions).traces.front().config_snapshot);
  }
  const std::vector<AccuracyRow> rows{{label, aggregate(verdicts, tasks)}};
  out << render_aligned_table(rows);
  out << "correct " << rows.front().report.correct << " of " << rows.front().report.n << "\n";
  return kExitOk;
}

int cmd_analyze(const Cli& cli, std::ostream& out) {
  const auto& o = cli.analyze_opts;
  const auto tasks = load_dataset(o.dataset);
  std::vector<RunDirectory> runs{load_run_dir(o.run_dir)};
  if (!o.paired.empty()) runs.push_back(load_run_dir(o.paired));
  const auto result = analyze_runs(runs, tasks, o.out);
  out << render_aligned_table(result.accuracy);
  for (std::size_t i = 0; i < result.usage.size(); ++i) {
    const auto& u = result.usage[i];
    out << "tool calls (" << result.accuracy[i].label.config << ", " << result.accuracy[i].label.thinking
        << "): total " << u.total_calls;
    for (auto role : kToolRoles) {
      out << ", " << role_name(role) << " " << u.counts.at(role) << " (" << u.share_text(role) << "%)";
    }
    out << "\n";
  }
  if (!result.pairs.empty()) {
    std::size_t labelled = 0;
    for (const auto& p : result.pairs) labelled += !p.primary_label.empty();
    out << "pairs: " << result.pairs.size() << ", labelled " << labelled << "\n";
  }
  out << "wrote analysis to " << o.out << "\n";
  return kExitOk;
}

}  // namespace

std::string cli_help(const std::string& subcommand) {
  Cli cli;
  if (subcommand.empty()) return cli.app.help();
  return cli.app.get_subcommand(subcommand)->help(cli.app.get_name());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  Cli cli;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    cli.app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (*cli.run) return cmd_run(cli, out, err, env);
    if (*cli.score) return cmd_score(cli, out, err);
    if (*cli.analyze) return cmd_analyze(cli, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace agentic
