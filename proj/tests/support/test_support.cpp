#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "agentic/cli.hpp"
#include "agentic/report.hpp"

namespace agentic::testing {

std::filesystem::path fixtures_dir() { return AGENTIC_TEST_FIXTURES_DIR; }
std::filesystem::path data_dir() { return AGENTIC_TEST_DATA_DIR; }
std::filesystem::path golden_dir() { return AGENTIC_TEST_GOLDEN_DIR; }

TempDir::TempDir() {
  auto pattern = (std::filesystem::temp_directory_path() / "agentic-test-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

ChatResponse reply(std::string content) {
  ChatResponse r;
  r.content = std::move(content);
  return r;
}

CliResult run_cli_captured(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const EnvLookup no_env = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
  CliResult result;
  result.exit_code = run_cli(args, out, err, no_env);
  result.out = out.str();
  result.err = err.str();
  return result;
}

Trace run_fixture(const std::string& name, const std::filesystem::path& out_dir) {
  const auto result =
      run_cli_captured({"run", "--backend", "scripted:" + (fixtures_dir() / name).string(), "--out", out_dir.string()});
  if (result.exit_code != kExitOk) {
    throw std::runtime_error("fixture " + name + " exited " + std::to_string(result.exit_code) + ": " + result.err);
  }
  const auto run = load_run_dir(out_dir);
  if (run.traces.size() != 1) throw std::runtime_error("fixture " + name + " produced more than one trace");
  return run.traces.front();
}

Task make_task(std::string id, int level, std::string gold, std::optional<AnswerShape> shape) {
  Task t;
  t.id = std::move(id);
  t.question = "question for " + t.id;
  t.level = level;
  t.gold_answer = std::move(gold);
  t.answer_shape = shape;
  return t;
}

Trace make_trace(std::string task_id, const std::vector<std::pair<AgentRole, std::string>>& calls,
                 std::string predicted, Termination termination) {
  Trace trace;
  trace.task_id = std::move(task_id);
  int index = 0;
  for (const auto& [role, text] : calls) {
    ToolCallRecord rec;
    rec.index = ++index;
    rec.tool = role;
    const char* key = role == AgentRole::WebSearch ? "query" : "task";
    rec.arguments = Json{{key, text}}.dump();
    rec.observation = "observation " + std::to_string(index);
    trace.tool_calls.push_back(std::move(rec));
  }
  trace.terminated_by = termination;
  trace.predicted_answer = std::move(predicted);
  if (termination == Termination::FinalAnswer) trace.final_answer = trace.predicted_answer;
  return trace;
}

const std::vector<PublishedRow>& published_rows() {
  static const std::vector<PublishedRow> rows{
      {"4B-Instruct", "No-Tools", "NO", {9.70, 20.75, 5.81, 0.00}},
      {"4B-Instruct", "No-Tools", "YES", {10.91, 18.87, 9.30, 0.00}},
      {"4B-Instruct", "Agentic", "NO", {16.36, 30.19, 12.79, 0.00}},
      {"4B-Instruct", "Agentic", "PLANNER", {18.18, 30.19, 15.12, 3.85}},
      {"4B-Instruct", "Agentic", "YES", {15.76, 26.42, 13.95, 0.00}},
      {"4B", "No-Tools", "NO", {6.06, 9.43, 4.65, 3.85}},
      {"4B", "No-Tools", "YES", {9.09, 15.09, 8.14, 0.00}},
      {"4B", "Agentic", "NO", {13.33, 15.09, 16.28, 0.00}},
      {"4B", "Agentic", "PLANNER", {10.91, 20.75, 6.98, 3.85}},
      {"4B", "Agentic", "YES", {9.09, 20.75, 3.49, 3.85}},
      {"8B", "No-Tools", "NO", {6.06, 11.32, 4.65, 0.00}},
      {"8B", "No-Tools", "YES", {6.06, 9.43, 5.81, 0.00}},
      {"8B", "Agentic", "NO", {10.30, 18.87, 6.98, 3.85}},
      {"8B", "Agentic", "PLANNER", {12.73, 22.64, 10.47, 0.00}},
      {"8B", "Agentic", "YES", {16.36, 30.19, 11.63, 3.85}},
      {"14B", "No-Tools", "NO", {7.27, 15.09, 2.33, 7.69}},
      {"14B", "No-Tools", "YES", {9.09, 16.98, 6.98, 0.00}},
      {"14B", "Agentic", "NO", {17.58, 24.53, 18.60, 0.00}},
      {"14B", "Agentic", "PLANNER", {19.39, 35.85, 12.79, 7.69}},
      {"14B", "Agentic", "YES", {20.61, 37.74, 16.28, 0.00}},
      {"32B", "No-Tools", "NO", {9.70, 16.98, 6.98, 3.85}},
      {"32B", "No-Tools", "YES", {12.73, 20.75, 9.30, 7.69}},
      {"32B", "Agentic", "NO", {25.45, 35.85, 23.26, 11.54}},
      {"32B", "Agentic", "PLANNER", {20.61, 33.96, 15.12, 11.54}},
      {"32B", "Agentic", "YES", {23.03, 33.96, 22.09, 3.85}},
  };
  return rows;
}

std::vector<CountSolution> solve_row(const PublishedRow& row, double tolerance) {
  auto close = [&](int correct, int n, double published) {
    return std::fabs(100.0 * correct / n - published) <= tolerance + 1e-9;
  };
  std::vector<CountSolution> out;
  for (int a = 0; a <= kLevelDenominators[1]; ++a) {
    if (!close(a, kLevelDenominators[1], row.percent[1])) continue;
    for (int b = 0; b <= kLevelDenominators[2]; ++b) {
      if (!close(b, kLevelDenominators[2], row.percent[2])) continue;
      for (int c = 0; c <= kLevelDenominators[3]; ++c) {
        if (!close(c, kLevelDenominators[3], row.percent[3])) continue;
        if (close(a + b + c, kLevelDenominators[0], row.percent[0])) out.push_back({a, b, c});
      }
    }
  }
  return out;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string strip(const std::string& s) {
  static const std::regex edges(R"(^\s+|\s+$)");
  return std::regex_replace(s, edges, "");
}

std::optional<double> oracle_number(std::string s) {
  static const std::regex marks("[,$]|\xE2\x82\xAC|\xC2\xA3|\xC2\xA5");
  static const std::regex percent(R"(\s*%$)");
  static const std::regex grammar(R"(^[+-]?(\d+\.?\d*|\.\d+)(e[+-]?\d+)?$)");
  s = strip(std::regex_replace(s, marks, ""));
  s = strip(std::regex_replace(s, percent, ""));
  if (!std::regex_match(s, grammar)) return std::nullopt;
  return std::stod(s);
}

std::string oracle_string_form(const std::string& s) {
  static const std::regex quoted(R"(^(["'])(.*)\1$)");
  static const std::regex curly("^(\xE2\x80\x9C(.*)\xE2\x80\x9D|\xE2\x80\x98(.*)\xE2\x80\x99)$");
  static const std::regex article(R"(^(the|an|a)\s+)");
  static const std::regex spaces(R"(\s+)");
  std::string out = s;
  std::smatch m;
  if (std::regex_match(out, m, quoted)) {
    out = strip(m[2].str());
  } else if (std::regex_match(out, m, curly)) {
    out = strip(m[2].matched ? m[2].str() : m[3].str());
  }
  out = std::regex_replace(out, article, "", std::regex_constants::format_first_only);
  return std::regex_replace(strip(out), spaces, " ");
}

std::vector<std::string> oracle_items(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(item);
  if (!s.empty() && s.back() == ',') items.emplace_back();
  if (s.empty()) items.emplace_back();
  for (auto& i : items) {
    static const std::regex article(R"(^(the|an|a)\s+)");
    static const std::regex spaces(R"(\s+)");
    i = std::regex_replace(strip(std::regex_replace(strip(i), article, "", std::regex_constants::format_first_only)),
                           spaces, " ");
  }
  return items;
}

}  // namespace

bool oracle_score(const std::string& predicted, const std::string& gold, bool list_shape) {
  const auto p = lower(strip(predicted));
  const auto g = lower(strip(gold));
  const auto pn = oracle_number(p);
  const auto gn = oracle_number(g);
  if (pn && gn) return *pn == *gn;
  if (list_shape || g.find(',') != std::string::npos) {
    const auto pi = oracle_items(p);
    const auto gi = oracle_items(g);
    if (pi.size() != gi.size()) return false;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      const auto a = oracle_number(pi[i]);
      const auto b = oracle_number(gi[i]);
      if (a && b ? *a != *b : pi[i] != gi[i]) return false;
    }
    return true;
  }
  return oracle_string_form(p) == oracle_string_form(g);
}

namespace {

const std::vector<std::string> kWords{"amsterdam", "jakarta",  "cobalt", "river",   "falcon", "granite",
                                      "meridian",  "orchid",   "saturn", "violet",  "willow", "zephyr",
                                      "harbor",    "lantern",  "quartz", "tundra",  "basalt", "citadel"};

std::string with_thousands(long long v) {
  auto digits = std::to_string(v);
  std::string out;
  const int n = static_cast<int>(digits.size());
  for (int i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

}  // namespace

std::vector<ScoreCase> generate_score_cases(std::size_t count, unsigned seed) {
  std::mt19937 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto word = [&] { return kWords[static_cast<std::size_t>(pick(0, static_cast<int>(kWords.size()) - 1))]; };

  std::vector<ScoreCase> cases;
  while (cases.size() < count) {
    const int family = static_cast<int>(cases.size() % 3);
    const int variant = pick(0, 5);
    if (family == 0) {
      const long long v = pick(1000, 9'999'999);
      const auto gold = std::to_string(v);
      switch (variant) {
        case 0: cases.push_back({"numeric", with_thousands(v), gold, true}); break;
        case 1: cases.push_back({"numeric", "$" + with_thousands(v), gold, true}); break;
        case 2: cases.push_back({"numeric", "  " + gold + ".00 ", gold, true}); break;
        case 3: cases.push_back({"numeric", gold + "%", gold + " %", true}); break;
        case 4: cases.push_back({"numeric", std::to_string(v + pick(1, 9)), gold, false}); break;
        default: cases.push_back({"numeric", std::to_string(v * 1000), gold, false}); break;
      }
    } else if (family == 1) {
      std::vector<std::string> items;
      const int n = pick(2, 4);
      while (static_cast<int>(items.size()) < n) {
        auto w = word();
        if (std::find(items.begin(), items.end(), w) == items.end()) items.push_back(w);
      }
      const auto gold = join(items, ", ");
      std::vector<std::string> pred = items;
      bool expected = true;
      switch (variant) {
        case 0:
          for (auto& i : pred) i = capitalize(i);
          break;
        case 1:
          pred.front() = "the " + pred.front();
          break;
        case 2:
          std::swap(pred.front(), pred.back());
          expected = false;
          break;
        case 3:
          pred.pop_back();
          expected = false;
          break;
        case 4:
          pred.back() = pred.back() + "x";
          expected = false;
          break;
        default:
          break;
      }
      const auto sep = variant == 5 ? " ,   " : ",";
      cases.push_back({"list", join(pred, sep), gold, expected});
    } else {
      const auto gold = word() + " " + word();
      switch (variant) {
        case 0: cases.push_back({"string", lower(gold) == gold ? capitalize(gold) : gold, gold, true}); break;
        case 1: cases.push_back({"string", "\"" + gold + "\"", gold, true}); break;
        case 2: cases.push_back({"string", "The " + gold, gold, true}); break;
        case 3: {
          auto spaced = gold;
          spaced.replace(spaced.find(' '), 1, "   ");
          cases.push_back({"string", "  " + spaced, gold, true});
          break;
        }
        case 4: cases.push_back({"string", gold + " " + word() + "s", gold, false}); break;
        default: cases.push_back({"string", gold + ".", gold, false}); break;
      }
    }
  }
  return cases;
}

}  // namespace agentic::testing
