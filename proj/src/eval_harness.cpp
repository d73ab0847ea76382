#include "agentic/eval_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <unordered_map>

#include "agentic/text_util.hpp"

namespace agentic {

DatasetParseError::DatasetParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

MissingField::MissingField(std::size_t line, const std::string& field)
    : DatasetParseError(line, "missing field \"" + field + "\"") {}

namespace {

const Json& required(const Json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) throw MissingField(line, key);
  return *it;
}

std::string required_string(const Json& rec, const char* key, std::size_t line) {
  const auto& v = required(rec, key, line);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw DatasetParseError(line, std::string("field \"") + key + "\" must be a string");
}

int parse_level(const Json& v, std::size_t line) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const auto s = text::trim(v.get_ref<const std::string&>());
    if (!s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return std::stoi(std::string(s));
    }
  }
  throw DatasetParseError(line, "field \"Level\" must be an integer");
}

bool is_number_grammar(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++int_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < s.size() && s[i] == 'e') {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

std::string strip_leading_article(std::string_view s) {
  for (std::string_view article : {"the ", "an ", "a "}) {
    if (s.starts_with(article)) return std::string(text::trim(s.substr(article.size())));
  }
  return std::string(s);
}

std::string strip_quotes(std::string_view s) {
  static const std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
      return std::string(text::trim(s.substr(open.size(), s.size() - open.size() - close.size())));
    }
  }
  return std::string(s);
}

std::string fold(std::string_view s) { return text::to_lower_ascii(text::trim(s)); }

std::string normalize_string_branch(std::string_view folded) {
  return text::collapse_whitespace(strip_leading_article(strip_quotes(folded)));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    auto item = text::trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    items.push_back(text::collapse_whitespace(strip_leading_article(item)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

bool item_match(const std::string& a, const std::string& b) {
  const auto na = parse_scored_number(a);
  const auto nb = parse_scored_number(b);
  if (na && nb) return *na == *nb;
  return a == b;
}

}  // namespace

std::vector<Task> parse_dataset(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<Task> tasks;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(text)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto rec = Json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw DatasetParseError(line_no, "not valid JSON");
    if (!rec.is_object()) throw DatasetParseError(line_no, "record must be a JSON object");
    Task task;
    task.id = required_string(rec, "task_id", line_no);
    task.question = required_string(rec, "Question", line_no);
    task.level = parse_level(required(rec, "Level", line_no), line_no);
    task.gold_answer = required_string(rec, "Final answer", line_no);
    if (auto it = rec.find("file_name"); it != rec.end() && it->is_string() && !it->get<std::string>().empty()) {
      task.attachments.push_back((base_dir / it->get<std::string>()).string());
    }
    if (auto it = rec.find("answer_shape"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) throw DatasetParseError(line_no, "field \"answer_shape\" must be a string");
      try {
        task.answer_shape = parse_answer_shape(it->get<std::string>());
      } catch (const ValidationError& e) {
        throw DatasetParseError(line_no, e.what());
      }
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<Task> load_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw std::invalid_argument("dataset not found: " + path.string());
  return parse_dataset(read_text_file(path), path.parent_path());
}

std::map<int, std::size_t> level_histogram(const std::vector<Task>& tasks) {
  std::map<int, std::size_t> hist;
  for (const auto& t : tasks) ++hist[t.level];
  return hist;
}

std::optional<double> parse_scored_number(std::string_view s) {
  std::string cleaned;
  cleaned.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto rest = s.substr(i);
    if (s[i] == ',' || s[i] == '$') continue;
    if (rest.starts_with("\xE2\x82\xAC")) {  // euro
      i += 2;
      continue;
    }
    if (rest.starts_with("\xC2\xA3") || rest.starts_with("\xC2\xA5")) {  // pound, yen
      i += 1;
      continue;
    }
    cleaned.push_back(s[i]);
  }
  auto view = text::trim(cleaned);
  if (view.ends_with('%')) view = text::trim(view.substr(0, view.size() - 1));
  if (!is_number_grammar(view)) return std::nullopt;
  return std::strtod(std::string(view).c_str(), nullptr);
}

bool score_answer(std::string_view predicted, std::string_view gold, const std::optional<AnswerShape>& shape) {
  const auto p = fold(predicted);
  const auto g = fold(gold);

  const auto pn = parse_scored_number(p);
  const auto gn = parse_scored_number(g);
  if (pn && gn) return *pn == *gn;

  const bool list_shape = shape && shape->kind == AnswerShape::Kind::CommaList;
  if (g.find(',') != std::string::npos || list_shape) {
    const auto pi = split_list(p);
    const auto gi = split_list(g);
    if (pi.size() != gi.size()) return false;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      if (!item_match(pi[i], gi[i])) return false;
    }
    return true;
  }
  return normalize_string_branch(p) == normalize_string_branch(g);
}

std::string normalized_answer(std::string_view answer) {
  const auto f = fold(answer);
  if (auto n = parse_scored_number(f)) return Json(*n).dump();
  if (f.find(',') != std::string::npos) {
    std::string out;
    for (const auto& item : split_list(f)) out += (out.empty() ? "" : ", ") + item;
    return out;
  }
  return normalize_string_branch(f);
}

Verdict judge(const Task& task, std::string_view predicted) {
  Verdict v;
  v.task_id = task.id;
  v.predicted = std::string(predicted);
  v.gold = task.gold_answer;
  v.correct = score_answer(predicted, task.gold_answer, task.answer_shape);
  v.normalized_predicted = normalized_answer(predicted);
  v.normalized_gold = normalized_answer(task.gold_answer);
  return v;
}

long percent_hundredths(std::size_t correct, std::size_t n) {
  if (n == 0) return 0;
  const auto c = static_cast<long long>(correct);
  const auto d = static_cast<long long>(n);
  return static_cast<long>((20000 * c + d) / (2 * d));
}

std::string format_hundredths(long hundredths) {
  const auto whole = hundredths / 100;
  const auto frac = hundredths % 100;
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

std::string AccuracyReport::level_text(int level) const {
  auto it = acc_per_level.find(level);
  return it == acc_per_level.end() ? "-" : format_hundredths(it->second);
}

AccuracyReport report_from_counts(std::size_t correct, std::size_t n, const std::map<int, LevelCount>& per_level) {
  if (n == 0) throw EmptyInput("no verdicts to aggregate");
  if (correct > n) throw ValidationError("correct count exceeds total");
  std::size_t sum_c = 0, sum_n = 0;
  for (const auto& [level, lc] : per_level) {
    if (lc.correct > lc.n) throw ValidationError("level " + std::to_string(level) + ": correct exceeds count");
    sum_c += lc.correct;
    sum_n += lc.n;
  }
  if (sum_c != correct || sum_n != n) {
    throw ValidationError("per-level counts (" + std::to_string(sum_c) + "/" + std::to_string(sum_n) +
                          ") do not add up to the totals (" + std::to_string(correct) + "/" + std::to_string(n) + ")");
  }
  AccuracyReport report;
  report.correct = correct;
  report.n = n;
  report.acc_overall = percent_hundredths(correct, n);
  report.per_level = per_level;
  for (const auto& [level, lc] : per_level) report.acc_per_level[level] = percent_hundredths(lc.correct, lc.n);
  return report;
}

AccuracyReport aggregate(const std::vector<Verdict>& verdicts, const std::vector<Task>& tasks) {
  if (verdicts.empty()) throw EmptyInput("no verdicts to aggregate");
  std::unordered_map<std::string, int> level_of;
  for (const auto& t : tasks) level_of.emplace(t.id, t.level);
  std::map<int, LevelCount> per_level;
  std::size_t correct = 0;
  for (const auto& v : verdicts) {
    auto it = level_of.find(v.task_id);
    if (it == level_of.end()) throw std::invalid_argument("verdict for unknown task " + v.task_id);
    auto& lc = per_level[it->second];
    ++lc.n;
    if (v.correct) {
      ++lc.correct;
      ++correct;
    }
  }
  return report_from_counts(correct, verdicts.size(), per_level);
}

}  // namespace agentic
