#include "agentic/telemetry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <unordered_map>

#include "agentic/controller.hpp"
#include "agentic/eval_harness.hpp"
#include "agentic/text_util.hpp"

namespace agentic {

long share_tenths(std::size_t count, std::size_t total) {
  if (total == 0) return 0;
  const auto c = static_cast<long long>(count);
  const auto t = static_cast<long long>(total);
  return static_cast<long>((2000 * c + t) / (2 * t));
}

std::string format_tenths(long tenths) { return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10); }

long ToolUsageStats::share_tenths(AgentRole role) const {
  auto it = counts.find(role);
  return agentic::share_tenths(it == counts.end() ? 0 : it->second, total_calls);
}

ToolUsageStats usage_stats(const std::vector<Trace>& traces, const std::vector<Task>& tasks) {
  if (traces.empty()) throw EmptyInput("no traces to summarize");
  std::unordered_map<std::string, int> level_of;
  for (const auto& t : tasks) level_of.emplace(t.id, t.level);

  ToolUsageStats stats;
  for (auto role : kToolRoles) stats.counts[role] = 0;
  for (const auto& trace : traces) {
    auto it = level_of.find(trace.task_id);
    if (it == level_of.end()) throw std::invalid_argument("trace for unknown task " + trace.task_id);
    auto& level = stats.per_level[it->second];
    for (auto role : kToolRoles) level.try_emplace(role, 0);
    ++stats.traces_per_level[it->second];
    for (const auto& rec : trace.tool_calls) {
      ++stats.counts[rec.tool];
      ++level[rec.tool];
      ++stats.total_calls;
    }
  }
  stats.traces = traces.size();
  for (const auto& [role, n] : stats.counts) {
    stats.share[role] = stats.total_calls == 0 ? 0.0 : 100.0 * static_cast<double>(n) / stats.total_calls;
  }
  return stats;
}

std::string_view failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::ToolOmission:
      return "ToolOmission";
    case FailureKind::OverSearchThrashing:
      return "OverSearchThrashing";
    case FailureKind::NonTermination:
      return "NonTermination";
    case FailureKind::OutputContractDrift:
      return "OutputContractDrift";
    case FailureKind::None:
      return "None";
  }
  return "None";
}

double query_similarity(std::string_view a, std::string_view b, QuerySimilarity mode) {
  const auto ta = text::tokenize(a);
  const auto tb = text::tokenize(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() || sb.empty()) return sa.empty() && sb.empty() ? 1.0 : 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  const auto denom = mode == QuerySimilarity::Jaccard ? sa.size() + sb.size() - common : std::min(sa.size(), sb.size());
  return static_cast<double>(common) / static_cast<double>(denom);
}

ThrashEvidence thrash_evidence(const Trace& trace, const TelemetryThresholds& thresholds) {
  ThrashEvidence ev;
  std::vector<std::string> seen;
  for (const auto& rec : trace.tool_calls) {
    if (rec.tool != AgentRole::WebSearch) continue;
    ++ev.search_calls;
    const auto query = record_argument_text(rec);
    const bool dup = std::any_of(seen.begin(), seen.end(), [&](const std::string& earlier) {
      return query_similarity(query, earlier, thresholds.similarity) >= thresholds.near_duplicate;
    });
    if (dup) {
      ++ev.duplicate_queries;
      ev.duplicate_indices.push_back(rec.index);
    }
    seen.push_back(query);
  }
  if (ev.search_calls > 0) ev.duplicate_ratio = static_cast<double>(ev.duplicate_queries) / ev.search_calls;
  return ev;
}

std::optional<std::string> shape_violation(std::string_view predicted, const AnswerShape& shape,
                                           std::string_view gold) {
  if (shape.kind == AnswerShape::Kind::FreeText) return std::nullopt;
  const auto p = text::trim(predicted);
  if (p.empty()) return "empty answer";
  const bool markup = p.front() == '#' || p.starts_with("**") ||
                      (p.front() == '-' && (p.size() == 1 || !std::isdigit(static_cast<unsigned char>(p[1]))));
  if (markup) return "answer starts with markup";

  switch (shape.kind) {
    case AnswerShape::Kind::FreeText:
      return std::nullopt;
    case AnswerShape::Kind::Integer: {
      auto n = parse_scored_number(text::to_lower_ascii(p));
      if (!n) return "not a number";
      if (std::floor(*n) != *n) return "not an integer";
      return std::nullopt;
    }
    case AnswerShape::Kind::Decimal:
      if (!parse_scored_number(text::to_lower_ascii(p))) return "not a number";
      return std::nullopt;
    case AnswerShape::Kind::CommaList: {
      auto arity = [](std::string_view s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), ',')) + 1; };
      const std::size_t want = shape.length > 0 ? shape.length : arity(text::trim(gold));
      const std::size_t got = arity(p);
      if (got != want) return "list has " + std::to_string(got) + " items, expected " + std::to_string(want);
      return std::nullopt;
    }
    case AnswerShape::Kind::CodeToken: {
      if (p.size() != shape.length) {
        return "token length " + std::to_string(p.size()) + ", expected " + std::to_string(shape.length);
      }
      if (!std::all_of(p.begin(), p.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
        return "token has non-alphanumeric characters";
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

FailureLabel classify_trace(const Trace& trace, const Task& task, const TelemetryThresholds& thresholds) {
  FailureLabel label;
  label.thrash = thrash_evidence(trace, thresholds);
  if (trace.terminated_by == Termination::BackendError) {
    label.evidence = "backend error";
    return label;
  }
  if (trace.terminated_by == Termination::BudgetExhausted) {
    label.kind = FailureKind::NonTermination;
    label.evidence = "budget of " + std::to_string(trace.config_snapshot.max_tool_calls) + " tool calls exhausted";
    return label;
  }
  if (task.answer_shape) {
    if (auto why = shape_violation(trace.predicted_answer, *task.answer_shape, task.gold_answer)) {
      label.kind = FailureKind::OutputContractDrift;
      label.evidence = format_answer_shape(*task.answer_shape) + ": " + *why;
      return label;
    }
  }
  const auto& ev = label.thrash;
  if (ev.search_calls >= thresholds.thrash_min && ev.duplicate_ratio >= thresholds.duplicate_ratio) {
    label.kind = FailureKind::OverSearchThrashing;
    label.evidence = std::to_string(ev.duplicate_queries) + " of " + std::to_string(ev.search_calls) +
                     " searches are near-duplicates";
  }
  return label;
}

std::string_view pair_direction_name(PairDirection direction) {
  switch (direction) {
    case PairDirection::Regression:
      return "Regression";
    case PairDirection::Improvement:
      return "Improvement";
    case PairDirection::Unchanged:
      return "Unchanged";
  }
  return "Unchanged";
}

std::string_view benefit_kind_name(BenefitKind kind) {
  switch (kind) {
    case BenefitKind::Decomposition:
      return "Decomposition";
    case BenefitKind::ConstraintPreservation:
      return "ConstraintPreservation";
    case BenefitKind::InstructionAdherence:
      return "InstructionAdherence";
  }
  return "Decomposition";
}

bool power_of_ten_ratio(double a, double b, int max_exponent) {
  if (a == 0.0 || b == 0.0 || !std::isfinite(a) || !std::isfinite(b) || (a < 0) != (b < 0)) return false;
  const double ratio = a / b;
  const double k = std::round(std::log10(std::fabs(ratio)));
  if (k == 0.0 || std::fabs(k) > max_exponent) return false;
  const double expected = std::pow(10.0, k);
  return std::fabs(std::fabs(ratio) - expected) <= 1e-9 * expected;
}

PairedFinding classify_pair(const Trace& nt_trace, const Trace& t_trace, const Task& task, bool nt_correct,
                            bool t_correct, const TelemetryThresholds& thresholds) {
  if (nt_trace.task_id != task.id || t_trace.task_id != task.id) {
    throw TaskMismatch("paired traces for '" + nt_trace.task_id + "' and '" + t_trace.task_id + "' vs task '" +
                       task.id + "'");
  }
  PairedFinding finding;
  finding.task_id = task.id;
  finding.nt_correct = nt_correct;
  finding.t_correct = t_correct;

  if (nt_correct && !t_correct) {
    finding.direction = PairDirection::Regression;
    for (auto role : kToolRoles) {
      const auto nt = nt_trace.count_calls(role);
      const auto t = t_trace.count_calls(role);
      if (nt > 0 && t < nt) {
        FailureLabel omission;
        omission.kind = FailureKind::ToolOmission;
        omission.evidence = std::string(role_name(role)) + " " + std::to_string(nt) + " -> " + std::to_string(t);
        omission.thrash = thrash_evidence(t_trace, thresholds);
        finding.failure = std::move(omission);
        break;
      }
    }
    if (!finding.failure) finding.failure = classify_trace(t_trace, task, thresholds);
    finding.primary_label =
        finding.failure->kind == FailureKind::None ? "" : std::string(failure_kind_name(finding.failure->kind));
    return finding;
  }

  if (!nt_correct && t_correct) {
    finding.direction = PairDirection::Improvement;
    auto kinds = [](const Trace& tr) {
      std::size_t n = 0;
      for (auto role : kToolRoles) n += tr.count_calls(role) > 0;
      return n;
    };
    const auto nt_num = parse_scored_number(text::to_lower_ascii(text::trim(nt_trace.predicted_answer)));
    const auto gold_num = parse_scored_number(text::to_lower_ascii(text::trim(task.gold_answer)));
    if (nt_num && gold_num && power_of_ten_ratio(*nt_num, *gold_num, thresholds.scale_max_exponent)) {
      finding.benefits.push_back(BenefitKind::ConstraintPreservation);
    }
    if (nt_trace.tool_calls.empty() && t_trace.tool_calls.empty()) {
      finding.benefits.push_back(BenefitKind::InstructionAdherence);
    }
    if (kinds(t_trace) > kinds(nt_trace)) finding.benefits.push_back(BenefitKind::Decomposition);
    if (!finding.benefits.empty()) finding.primary_label = std::string(benefit_kind_name(finding.benefits.front()));
    return finding;
  }

  finding.direction = PairDirection::Unchanged;
  return finding;
}

Json to_json(const PairedFinding& f) {
  Json j;
  j["task_id"] = f.task_id;
  j["direction"] = pair_direction_name(f.direction);
  j["nt_correct"] = f.nt_correct;
  j["t_correct"] = f.t_correct;
  j["label"] = f.primary_label;
  if (f.failure) {
    j["failure"] = {{"kind", failure_kind_name(f.failure->kind)},
                    {"evidence", f.failure->evidence},
                    {"search_calls", f.failure->thrash.search_calls},
                    {"duplicate_ratio", f.failure->thrash.duplicate_ratio}};
  } else {
    j["failure"] = nullptr;
  }
  j["benefits"] = Json::array();
  for (auto b : f.benefits) j["benefits"].push_back(benefit_kind_name(b));
  return j;
}

}  // namespace agentic
