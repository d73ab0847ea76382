#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentic/core_types.hpp"
#include "agentic/model_gateway.hpp"
#include "agentic/trace_io.hpp"

namespace agentic::testing {

std::filesystem::path fixtures_dir();
std::filesystem::path data_dir();
std::filesystem::path golden_dir();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Backend whose replies come from a callback.
class LambdaBackend final : public ChatBackend {
 public:
  using Handler = std::function<ChatResponse(const ChatRequest&)>;

  explicit LambdaBackend(Handler handler, bool thinking_toggle = true)
      : handler_(std::move(handler)), thinking_toggle_(thinking_toggle) {}

  ChatResponse execute(const ChatRequest& request) override { return handler_(request); }
  bool supports_thinking_toggle() const override { return thinking_toggle_; }
  std::string describe() const override { return "lambda"; }

 private:
  Handler handler_;
  bool thinking_toggle_;
};

ChatResponse reply(std::string content);

struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs the CLI in-process with an empty environment.
CliResult run_cli_captured(const std::vector<std::string>& args);

/// Runs one scripted fixture bundle into `out_dir` and returns its only trace.
Trace run_fixture(const std::string& name, const std::filesystem::path& out_dir);

Task make_task(std::string id, int level, std::string gold, std::optional<AnswerShape> shape = std::nullopt);

/// A finished trace with one record per (tool, argument text) pair.
Trace make_trace(std::string task_id, const std::vector<std::pair<AgentRole, std::string>>& calls,
                 std::string predicted, Termination termination = Termination::FinalAnswer);

// ---------------------------------------------------------------------------
// Published accuracy table and its integer-count oracle
// ---------------------------------------------------------------------------

struct PublishedRow {
  const char* model;
  const char* config;
  const char* thinking;
  std::array<double, 4> percent;  // ACC, L1, L2, L3
};

inline constexpr std::array<int, 4> kLevelDenominators{165, 53, 86, 26};

const std::vector<PublishedRow>& published_rows();

struct CountSolution {
  int l1 = 0;
  int l2 = 0;
  int l3 = 0;
  int total() const { return l1 + l2 + l3; }
};

/// Every (l1, l2, l3) whose per-level and overall percentages land within
/// `tolerance` of the published row.
std::vector<CountSolution> solve_row(const PublishedRow& row, double tolerance = 0.005);

// ---------------------------------------------------------------------------
// Scorer oracle
// ---------------------------------------------------------------------------

/// Regex-based restatement of the answer-matching rules.
bool oracle_score(const std::string& predicted, const std::string& gold, bool list_shape = false);

struct ScoreCase {
  std::string family;  // numeric | list | string
  std::string predicted;
  std::string gold;
  bool expected = false;  // known from how the case was constructed
};

/// Deterministic generated cases, roughly a third per family.
std::vector<ScoreCase> generate_score_cases(std::size_t count, unsigned seed);

}  // namespace agentic::testing
