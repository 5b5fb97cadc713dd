#include "sacot/trace.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "sacot/error.hpp"
#include "sacot/rule_language.hpp"

namespace sacot {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_quote(char c) { return c == '`' || c == '\'' || c == '"'; }

std::string strip_period(std::string_view s) {
  s = trim(s);
  while (!s.empty() && s.back() == '.') {
    s.remove_suffix(1);
    s = trim(s);
  }
  return std::string(s);
}

// Text between matching quote characters; empty when nothing is quoted.
std::vector<std::string> quoted_items(std::string_view s) {
  std::vector<std::string> items;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_quote(s[i])) continue;
    // An apostrophe inside a word is not a quote.
    if (s[i] == '\'' && i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1]))) continue;
    const auto close = s.find(s[i], i + 1);
    if (close == std::string_view::npos) break;
    items.push_back(strip_period(s.substr(i + 1, close - i - 1)));
    i = close;
  }
  return items;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      std::string_view item = trim(s.substr(start, i - start));
      while (!item.empty() && is_quote(item.front())) item.remove_prefix(1);
      while (!item.empty() && is_quote(item.back())) item.remove_suffix(1);
      std::string cleaned = strip_period(item);
      if (!cleaned.empty()) out.push_back(std::move(cleaned));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> premise_list(std::string_view s) {
  auto quoted = quoted_items(s);
  if (!quoted.empty()) return quoted;
  return split_list(s);
}

std::string single_premise(std::string_view s) {
  auto quoted = quoted_items(s);
  if (!quoted.empty()) return quoted.front();
  std::string_view t = trim(s);
  while (!t.empty() && is_quote(t.front())) t.remove_prefix(1);
  while (!t.empty() && is_quote(t.back())) t.remove_suffix(1);
  return strip_period(t);
}

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

const std::regex& kb_regex() {
  static const std::regex re(R"(^#\s*KB\s*=\s*\{(.*)\}\s*\.?$)", kIcase);
  return re;
}
const std::regex& validate_comment_regex() {
  static const std::regex re(R"(^#\s*valid)", kIcase);
  return re;
}
const std::regex& fact_regex() {
  static const std::regex re(R"(^=>\s*Rule\s*(\d+)\s*=\s*(.*)$)", kIcase);
  return re;
}
const std::regex& infer_regex() {
  static const std::regex re(R"(^=>\s*F\s*\(\s*KB\s*\((.*?)\)\s*,\s*Rule\s*(\d+)\s*\)\s*=>\s*(.*)$)", kIcase);
  return re;
}
const std::regex& validate_regex() {
  static const std::regex re(
      R"(^=>\s*Validate\s*\(\s*Question\s*=\s*(.*?)\s*,\s*KB\s*\((.*)\)\s*\)\s*=\s*\**\s*([A-Za-z]+))", kIcase);
  return re;
}
const std::regex& bare_answer_regex() {
  static const std::regex re(R"(^=>\s*Answer\s*[=:]\s*\**\s*([A-Za-z]+))", kIcase);
  return re;
}
const std::regex& already_regex() {
  static const std::regex re(R"(\(\s*already\s+in\s+KB\s*\))", kIcase);
  return re;
}

std::string_view strip_answer_prefix(std::string_view line) {
  static const std::regex prefix(R"(^#\s*\(\s*Answer\s*\)\s*:?\s*"?:?)", kIcase);
  std::cmatch m;
  if (std::regex_search(line.begin(), line.end(), m, prefix)) {
    return trim(line.substr(static_cast<std::size_t>(m.length(0))));
  }
  return line;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

std::string join_premises(const std::vector<std::string>& items, std::string_view open, std::string_view close) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += open;
    out += items[i];
    out += close;
  }
  return out;
}

std::optional<Answer> interpret_answer_value(std::string_view value, bool three_way) {
  std::string_view v = trim(value);
  while (!v.empty() && (is_quote(v.front()) || v.front() == '(')) v.remove_prefix(1);
  if (v.empty()) return std::nullopt;
  const bool lone_letter = v.size() == 1 || !std::isalpha(static_cast<unsigned char>(v[1]));
  if (lone_letter && std::isalpha(static_cast<unsigned char>(v[0]))) {
    const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    if (three_way) {
      if (auto t = truth_from_letter(letter)) return Answer::truth(*t);
      return std::nullopt;
    }
    if (letter >= 'A' && letter <= 'G') return Answer::option(letter);
    return std::nullopt;
  }
  static const std::regex word(R"(\b(true|false|uncertain|unknown)\b)", kIcase);
  std::cmatch m;
  const std::string s(v);
  if (three_way && std::regex_search(s.c_str(), m, word)) {
    if (auto t = parse_truth_value(m.str(1))) return Answer::truth(*t);
  }
  return std::nullopt;
}

std::optional<Answer> json_answer(std::string_view text, bool three_way) {
  static const std::regex field(R"re("answer"\s*:\s*("([^"]*)"|[A-Za-z]+))re", kIcase);
  const std::string s(text);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), field); it != std::sregex_iterator(); ++it) {
    last = (*it)[2].matched ? (*it)[2].str() : (*it)[1].str();
  }
  if (!last) return std::nullopt;
  return interpret_answer_value(*last, three_way);
}

}  // namespace

TraceStep TraceStep::fact_collect(int tag, std::string premise) {
  TraceStep s;
  s.kind = Kind::FactCollect;
  s.rule_tag = tag;
  s.produced.push_back(std::move(premise));
  return s;
}

TraceStep TraceStep::infer(int tag, std::vector<std::string> cited, std::string produced, bool already) {
  TraceStep s;
  s.kind = Kind::Infer;
  s.rule_tag = tag;
  s.cited_premises = std::move(cited);
  s.produced.push_back(std::move(produced));
  s.already_in_kb = already;
  return s;
}

TraceStep TraceStep::snapshot(std::vector<std::string> contents) {
  TraceStep s;
  s.kind = Kind::KBSnapshot;
  s.kb_contents = std::move(contents);
  return s;
}

TraceStep TraceStep::comment(std::string text) {
  TraceStep s;
  s.kind = Kind::Comment;
  s.text = std::move(text);
  return s;
}

std::size_t Trace::reasoning_steps() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [](const TraceStep& s) { return s.is_reasoning(); }));
}

Trace parse_trace(std::string_view text) {
  Trace trace;
  trace.raw = std::string(text);
  std::size_t reasoning = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto malformed = [&](std::string_view line) {
    trace.diagnostics.push_back({TraceDiagnostic::Kind::MalformedLine, line_no, std::string(line)});
  };

  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view raw_line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::string_view line = strip_answer_prefix(trim(raw_line));
    if (line.empty()) {
      if (end >= text.size()) break;
      continue;
    }
    const std::string line_str(line);
    std::smatch m;

    if (trace.header_text.empty() && trace.steps.empty() && !trace.validate &&
        starts_with_icase(line, "Start from")) {
      trace.header_text = line_str;
    } else if (trace.validate) {
      // Anything after the final answer is ignored, but prose is still reported.
      if (line.front() != '#') malformed(line);
    } else if (line.front() == '#') {
      if (std::regex_match(line_str, m, kb_regex())) {
        trace.steps.push_back(TraceStep::snapshot(split_list(m.str(1))));
      } else if (std::regex_search(line_str, validate_comment_regex())) {
        // Canonical pre-Validate comment; regenerated by the renderer.
      } else {
        std::string_view body = trim(line.substr(1));
        trace.steps.push_back(TraceStep::comment(std::string(body)));
      }
    } else if (std::regex_match(line_str, m, infer_regex())) {
      std::string rest = m.str(3);
      const bool already = std::regex_search(rest, already_regex());
      rest = std::regex_replace(rest, already_regex(), "");
      TraceStep step;
      step.kind = TraceStep::Kind::Infer;
      step.rule_tag = std::stoi(m.str(2));
      step.cited_premises = premise_list(m.str(1));
      step.produced = premise_list(rest);
      step.already_in_kb = already;
      if (step.produced.empty()) {
        malformed(line);
      } else {
        if (++reasoning > kStepBudget) {
          trace.truncated = true;
          trace.diagnostics.push_back({TraceDiagnostic::Kind::UnstoppableFlow, line_no, "step budget exceeded"});
          break;
        }
        trace.steps.push_back(std::move(step));
      }
    } else if (std::regex_match(line_str, m, fact_regex())) {
      std::string premise = single_premise(m.str(2));
      if (premise.empty()) {
        malformed(line);
      } else {
        if (++reasoning > kStepBudget) {
          trace.truncated = true;
          trace.diagnostics.push_back({TraceDiagnostic::Kind::UnstoppableFlow, line_no, "step budget exceeded"});
          break;
        }
        trace.steps.push_back(TraceStep::fact_collect(std::stoi(m.str(1)), std::move(premise)));
      }
    } else if (std::regex_search(line_str, m, validate_regex())) {
      auto answer = parse_truth_value(m.str(3));
      if (!answer) {
        malformed(line);
      } else {
        ValidateStep v;
        v.question_text = single_premise(m.str(1));
        v.cited_premise = single_premise(m.str(2));
        v.answer = *answer;
        trace.validate = v;
      }
    } else if (std::regex_search(line_str, m, bare_answer_regex())) {
      auto answer = parse_truth_value(m.str(1));
      if (!answer) {
        malformed(line);
      } else {
        ValidateStep v;
        v.answer = *answer;
        v.bare = true;
        trace.validate = v;
      }
    } else {
      malformed(line);
    }
    if (end >= text.size()) break;
  }
  return trace;
}

std::string render_trace(const Trace& trace) {
  if (!trace.validate) throw NonHaltingTrace();
  std::string out;
  auto line = [&out](std::string_view s) {
    out += s;
    out += '\n';
  };
  if (!trace.header_text.empty()) line(trace.header_text);
  for (const auto& step : trace.steps) {
    switch (step.kind) {
      case TraceStep::Kind::FactCollect:
        line("=> Rule" + std::to_string(step.rule_tag) + " = " + join_premises(step.produced, "`", "`"));
        break;
      case TraceStep::Kind::Infer: {
        std::string s = "=> F(KB(" + join_premises(step.cited_premises, "'", "'") + "), Rule" +
                        std::to_string(step.rule_tag) + ") => " + join_premises(step.produced, "`", "`");
        if (step.already_in_kb) s += " (already in KB)";
        line(s);
        break;
      }
      case TraceStep::Kind::KBSnapshot:
        line("# KB = {" + join_premises(step.kb_contents, "", "") + "}");
        break;
      case TraceStep::Kind::Comment:
        line("# " + step.text);
        break;
    }
  }
  line(kValidateComment);
  const ValidateStep& v = *trace.validate;
  if (v.bare) {
    line("=> Answer = " + std::string(to_string(v.answer)) + ".");
  } else {
    line("=> Validate(Question=`" + v.question_text + "`, KB('" + v.cited_premise + "')) = " +
         std::string(to_string(v.answer)) + ".");
  }
  return out;
}

std::string normalize_premise(std::string_view premise) {
  if (auto lit = parse_premise(premise)) return lit->key();
  std::string out;
  std::string word;
  auto flush = [&] {
    if (!word.empty() && word != "the" && word != "a" && word != "an") {
      if (!out.empty()) out.push_back(' ');
      out += word;
    }
    word.clear();
  };
  for (char c : premise) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      flush();
    } else if (!is_quote(c) && c != '.') {
      word.push_back(static_cast<char>(std::tolower(uc)));
    }
  }
  flush();
  return out;
}

SnapshotDelta snapshot_delta(const TraceStep& before, const TraceStep& after) {
  std::set<std::string> a;
  std::set<std::string> b;
  for (const auto& p : before.kb_contents) a.insert(normalize_premise(p));
  for (const auto& p : after.kb_contents) b.insert(normalize_premise(p));
  SnapshotDelta delta;
  for (const auto& p : after.kb_contents) {
    if (!a.contains(normalize_premise(p))) delta.added.push_back(p);
  }
  for (const auto& p : before.kb_contents) {
    if (!b.contains(normalize_premise(p))) delta.removed.push_back(p);
  }
  return delta;
}

Answer extract_answer(std::string_view text, PromptVariant variant, bool three_way) {
  if (!is_symbolic(variant)) {
    if (auto a = json_answer(text, three_way)) return *a;
    return Answer::unknown();
  }

  const Trace trace = parse_trace(text);
  if (trace.validate) {
    if (three_way) return Answer::truth(trace.validate->answer);
  }
  if (auto a = json_answer(text, three_way)) return *a;

  // Last answer-bearing line.
  static const std::regex truth_word(R"(\b(true|false|uncertain|unknown)\b)", kIcase);
  static const std::regex option_word(R"(answer\s*(?:is|=|:)?\s*\(?([A-G])\)?(?![A-Za-z]))", kIcase);
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
    const std::string line(trim(*it));
    const std::string lowered = to_lower(line);
    const bool bearing = lowered.find("answer") != std::string::npos || lowered.find("validate") != std::string::npos ||
                         lowered.rfind("=>", 0) == 0;
    if (!bearing) continue;
    std::smatch m;
    if (three_way) {
      std::string last;
      for (auto w = std::sregex_iterator(line.begin(), line.end(), truth_word); w != std::sregex_iterator(); ++w) {
        last = w->str(1);
      }
      if (!last.empty()) return Answer::truth(*parse_truth_value(last));
    } else if (std::regex_search(line, m, option_word)) {
      return Answer::option(static_cast<char>(std::toupper(static_cast<unsigned char>(m.str(1)[0]))));
    }
  }
  return Answer::unknown();
}

}  // namespace sacot
