#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace sacot {

enum class TruthValue { True, False, Uncertain };

std::string_view to_string(TruthValue v);
std::optional<TruthValue> parse_truth_value(std::string_view text);

/// Option letters for three-way questions: A=True, B=False, C=Uncertain.
char truth_letter(TruthValue v);
std::optional<TruthValue> truth_from_letter(char letter);

/// A predicted or gold answer: a truth value, a multiple-choice option
/// letter, or nothing recognisable.
class Answer {
 public:
  enum class Kind { Unknown, Truth, Option };

  Answer() = default;
  static Answer truth(TruthValue v) { return Answer(Kind::Truth, v, 0); }
  static Answer option(char letter) { return Answer(Kind::Option, TruthValue::Uncertain, letter); }
  static Answer unknown() { return Answer(); }

  Kind kind() const noexcept { return kind_; }
  bool is_unknown() const noexcept { return kind_ == Kind::Unknown; }
  bool is_truth() const noexcept { return kind_ == Kind::Truth; }
  bool is_option() const noexcept { return kind_ == Kind::Option; }
  TruthValue truth_value() const noexcept { return truth_; }
  char letter() const noexcept { return letter_; }

  /// "True", "False", "Uncertain", an option letter, or "Unknown".
  std::string str() const;
  /// Inverse of str(); anything unrecognised becomes Unknown.
  static Answer parse(std::string_view text);

  friend bool operator==(const Answer&, const Answer&) = default;

 private:
  Answer(Kind k, TruthValue t, char l) : kind_(k), truth_(t), letter_(l) {}

  Kind kind_ = Kind::Unknown;
  TruthValue truth_ = TruthValue::Uncertain;
  char letter_ = 0;
};

enum class PromptVariant { Standard, CoT, SymbolicAided, SymbolicAidedNoKB, SymbolicAidedNoValidate };

bool is_symbolic(PromptVariant v);
/// CLI spelling: standard, cot, symbolic, symbolic-nokb, symbolic-novalidate.
std::string_view to_string(PromptVariant v);
std::optional<PromptVariant> parse_variant(std::string_view name);

}  // namespace sacot
