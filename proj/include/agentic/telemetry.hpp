#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentic/core_types.hpp"
#include "agentic/trace_io.hpp"

namespace agentic {

// ---------------------------------------------------------------------------
// Usage statistics
// ---------------------------------------------------------------------------

/// Share in tenths of a percent, rounded half up (294 for 5 of 17).
long share_tenths(std::size_t count, std::size_t total);
std::string format_tenths(long tenths);  // "29.4"

struct ToolUsageStats {
  std::map<AgentRole, std::size_t> counts;  // every tool role present, zero included
  std::size_t total_calls = 0;
  std::map<AgentRole, double> share;  // percent, unrounded
  std::size_t traces = 0;
  std::map<int, std::map<AgentRole, std::size_t>> per_level;
  std::map<int, std::size_t> traces_per_level;

  long share_tenths(AgentRole role) const;
  std::string share_text(AgentRole role) const { return format_tenths(share_tenths(role)); }
};

/// Throws EmptyInput (from eval_harness) for no traces and
/// std::invalid_argument when a trace has no matching task.
ToolUsageStats usage_stats(const std::vector<Trace>& traces, const std::vector<Task>& tasks);

// ---------------------------------------------------------------------------
// Failure labels
// ---------------------------------------------------------------------------

enum class FailureKind { ToolOmission, OverSearchThrashing, NonTermination, OutputContractDrift, None };

std::string_view failure_kind_name(FailureKind kind);

enum class QuerySimilarity { Overlap, Jaccard };

struct TelemetryThresholds {
  std::size_t thrash_min = 5;
  double near_duplicate = 0.8;
  double duplicate_ratio = 0.3;
  QuerySimilarity similarity = QuerySimilarity::Overlap;
  int scale_max_exponent = 6;
};

struct ThrashEvidence {
  std::size_t search_calls = 0;
  std::size_t duplicate_queries = 0;
  double duplicate_ratio = 0.0;
  std::vector<int> duplicate_indices;  // tool-call indices judged near-duplicates
};

struct FailureLabel {
  FailureKind kind = FailureKind::None;
  std::string evidence;
  ThrashEvidence thrash;
};

/// Case-folded token-set similarity of two queries.
double query_similarity(std::string_view a, std::string_view b, QuerySimilarity mode);

ThrashEvidence thrash_evidence(const Trace& trace, const TelemetryThresholds& thresholds = {});

/// Why `predicted` violates `shape`, or nullopt when it conforms.
std::optional<std::string> shape_violation(std::string_view predicted, const AnswerShape& shape,
                                           std::string_view gold);

/// Decision order: NonTermination, OutputContractDrift, OverSearchThrashing,
/// None. Traces that ended in a backend error are labeled None.
FailureLabel classify_trace(const Trace& trace, const Task& task, const TelemetryThresholds& thresholds = {});

// ---------------------------------------------------------------------------
// Paired findings (no-thinking vs thinking run of one task)
// ---------------------------------------------------------------------------

class TaskMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PairDirection { Regression, Improvement, Unchanged };  // from the no-thinking run's point of view

std::string_view pair_direction_name(PairDirection direction);

enum class BenefitKind { Decomposition, ConstraintPreservation, InstructionAdherence };

std::string_view benefit_kind_name(BenefitKind kind);

struct PairedFinding {
  std::string task_id;
  PairDirection direction = PairDirection::Unchanged;
  bool nt_correct = false;
  bool t_correct = false;
  std::optional<FailureLabel> failure;  // regressions
  std::vector<BenefitKind> benefits;    // improvements
  std::string primary_label;            // "" when nothing applies
};

/// True when a/b is 10^k for a nonzero k with |k| <= max_exponent.
bool power_of_ten_ratio(double a, double b, int max_exponent);

PairedFinding classify_pair(const Trace& nt_trace, const Trace& t_trace, const Task& task, bool nt_correct,
                            bool t_correct, const TelemetryThresholds& thresholds = {});

Json to_json(const PairedFinding& finding);

}  // namespace agentic
