#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentic/core_types.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

class DatasetParseError : public std::runtime_error {
 public:
  DatasetParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class MissingField : public DatasetParseError {
 public:
  MissingField(std::size_t line, const std::string& field);
};

class EmptyInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// GAIA metadata layout, one JSON object per line: task_id, Question, Level
/// (integer or digit string), "Final answer", optional file_name, optional
/// answer_shape. Attachments are resolved against the file's directory.
/// Blank lines are skipped.
std::vector<Task> load_dataset(const std::filesystem::path& path);
std::vector<Task> parse_dataset(std::string_view text, const std::filesystem::path& base_dir = {});

std::map<int, std::size_t> level_histogram(const std::vector<Task>& tasks);

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

/// Parses a number after removing thousands separators, currency marks and a
/// trailing percent sign. Input is expected trimmed and case-folded.
std::optional<double> parse_scored_number(std::string_view s);

/// Quasi-exact match. Steps: trim; case-fold; numeric comparison when both
/// sides parse as numbers; list comparison when the gold answer contains a
/// comma (or the shape is a list); otherwise string comparison after removing
/// surrounding quotes and a leading article and collapsing whitespace.
bool score_answer(std::string_view predicted, std::string_view gold,
                  const std::optional<AnswerShape>& shape = std::nullopt);

/// The form a single answer is compared in (for reports).
std::string normalized_answer(std::string_view answer);

struct Verdict {
  std::string task_id;
  bool correct = false;
  std::string predicted;
  std::string gold;
  std::string normalized_predicted;
  std::string normalized_gold;
};

Verdict judge(const Task& task, std::string_view predicted);

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

/// 100 * correct / n in hundredths of a percent, rounded half up.
long percent_hundredths(std::size_t correct, std::size_t n);
/// "25.45"
std::string format_hundredths(long hundredths);

struct LevelCount {
  std::size_t correct = 0;
  std::size_t n = 0;

  bool operator==(const LevelCount&) const = default;
};

struct AccuracyReport {
  std::size_t correct = 0;
  std::size_t n = 0;
  long acc_overall = 0;               // hundredths
  std::map<int, long> acc_per_level;  // hundredths
  std::map<int, LevelCount> per_level;
  Json config_echo;

  std::string acc_text() const { return format_hundredths(acc_overall); }
  std::string level_text(int level) const;  // "-" when the level is absent
};

/// Throws EmptyInput for no verdicts and std::invalid_argument when a verdict
/// has no matching task.
AccuracyReport aggregate(const std::vector<Verdict>& verdicts, const std::vector<Task>& tasks);

/// Builds a report from counts; throws ValidationError when the per-level
/// counts do not add up to the totals.
AccuracyReport report_from_counts(std::size_t correct, std::size_t n, const std::map<int, LevelCount>& per_level);

}  // namespace agentic
