#pragma once

// Symbolic reasoning traces:
//
//   Start from the object and their condition mentioned in the question to collect relevant facts: Erin, is not quiet
//   # KB = {}
//   => Rule4 = `Erin is red`
//   # KB = {Erin is red}
//   => F(KB('Erin is red'), Rule9) => `Erin is rough`
//   # KB = {Erin is red, Erin is rough}
//   # valid the question with current inferred premises
//   => Validate(Question=`Erin is not quiet`, KB('Erin is quiet')) = False.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sacot/answer.hpp"

namespace sacot {

/// Reasoning steps (FactCollect + Infer) beyond which a trace is truncated.
inline constexpr std::size_t kStepBudget = 200;

inline constexpr std::string_view kTraceHeaderPrefix =
    "Start from the object and their condition mentioned in the question to collect relevant facts";
inline constexpr std::string_view kValidateComment = "# valid the question with current inferred premises";

struct TraceStep {
  enum class Kind { FactCollect, Infer, KBSnapshot, Comment };

  Kind kind = Kind::Comment;
  int rule_tag = 0;
  /// Infer: the premises inside KB(...).
  std::vector<std::string> cited_premises;
  /// FactCollect: exactly one entry. Infer: one or more conclusions.
  std::vector<std::string> produced;
  bool already_in_kb = false;
  /// KBSnapshot entries in textual order.
  std::vector<std::string> kb_contents;
  /// Comment text without the leading '#'.
  std::string text;

  static TraceStep fact_collect(int tag, std::string premise);
  static TraceStep infer(int tag, std::vector<std::string> cited, std::string produced, bool already = false);
  static TraceStep snapshot(std::vector<std::string> contents);
  static TraceStep comment(std::string text);

  bool is_reasoning() const noexcept { return kind == Kind::FactCollect || kind == Kind::Infer; }

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct ValidateStep {
  std::string question_text;
  std::string cited_premise;
  TruthValue answer = TruthValue::Uncertain;
  /// "=> Answer = X." form used when the Validate function is ablated.
  bool bare = false;

  friend bool operator==(const ValidateStep&, const ValidateStep&) = default;
};

struct TraceDiagnostic {
  enum class Kind { MalformedLine, UnstoppableFlow };

  Kind kind = Kind::MalformedLine;
  std::size_t line = 0;  // 1-based
  std::string text;

  friend bool operator==(const TraceDiagnostic&, const TraceDiagnostic&) = default;
};

struct Trace {
  std::string header_text;
  std::vector<TraceStep> steps;
  std::optional<ValidateStep> validate;
  std::vector<TraceDiagnostic> diagnostics;
  bool truncated = false;
  std::string raw;

  bool halted() const noexcept { return validate.has_value(); }
  std::size_t reasoning_steps() const noexcept;

  /// Structural equality; raw text and diagnostics are not compared.
  friend bool operator==(const Trace& a, const Trace& b) {
    return a.header_text == b.header_text && a.steps == b.steps && a.validate == b.validate;
  }
};

/// Total: never throws. Unrecognised non-comment lines become MalformedLine
/// diagnostics; more than kStepBudget reasoning steps truncates the trace with
/// an UnstoppableFlow diagnostic.
Trace parse_trace(std::string_view text);

/// Canonical text. Throws NonHaltingTrace when the trace has no Validate step.
std::string render_trace(const Trace& trace);

/// Comparison key for a premise: the literal key when the premise parses in the
/// rule dialect, otherwise the lower-cased, article-stripped text.
std::string normalize_premise(std::string_view premise);

/// Set differences between two KB snapshots under normalize_premise.
struct SnapshotDelta {
  std::vector<std::string> added;
  std::vector<std::string> removed;
};
SnapshotDelta snapshot_delta(const TraceStep& before, const TraceStep& after);

/// Final answer of a model output. Standard/CoT read the trailing JSON
/// object's "answer"; symbolic variants read the Validate line and fall back to
/// the last answer-bearing line. With `three_way`, letters A/B/C map to
/// True/False/Uncertain; otherwise letters are returned as options.
Answer extract_answer(std::string_view text, PromptVariant variant, bool three_way = true);

}  // namespace sacot
