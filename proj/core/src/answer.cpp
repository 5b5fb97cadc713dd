#include "sacot/answer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <utility>

namespace sacot {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::array<std::pair<PromptVariant, std::string_view>, 5> kVariantNames{{
    {PromptVariant::Standard, "standard"},
    {PromptVariant::CoT, "cot"},
    {PromptVariant::SymbolicAided, "symbolic"},
    {PromptVariant::SymbolicAidedNoKB, "symbolic-nokb"},
    {PromptVariant::SymbolicAidedNoValidate, "symbolic-novalidate"},
}};

}  // namespace

std::string_view to_string(TruthValue v) {
  switch (v) {
    case TruthValue::True:
      return "True";
    case TruthValue::False:
      return "False";
    case TruthValue::Uncertain:
      return "Uncertain";
  }
  return "Uncertain";
}

std::optional<TruthValue> parse_truth_value(std::string_view text) {
  const std::string t = lower(text);
  if (t == "true") return TruthValue::True;
  if (t == "false") return TruthValue::False;
  // ProofWriter's "Unknown" label is the same open-world verdict.
  if (t == "uncertain" || t == "unknown") return TruthValue::Uncertain;
  return std::nullopt;
}

char truth_letter(TruthValue v) {
  switch (v) {
    case TruthValue::True:
      return 'A';
    case TruthValue::False:
      return 'B';
    case TruthValue::Uncertain:
      return 'C';
  }
  return 'C';
}

std::optional<TruthValue> truth_from_letter(char letter) {
  switch (std::toupper(static_cast<unsigned char>(letter))) {
    case 'A':
      return TruthValue::True;
    case 'B':
      return TruthValue::False;
    case 'C':
      return TruthValue::Uncertain;
    default:
      return std::nullopt;
  }
}

std::string Answer::str() const {
  switch (kind_) {
    case Kind::Truth:
      return std::string(to_string(truth_));
    case Kind::Option:
      return std::string(1, letter_);
    case Kind::Unknown:
      break;
  }
  return "Unknown";
}

Answer Answer::parse(std::string_view text) {
  if (text.size() == 1 && std::isalpha(static_cast<unsigned char>(text[0]))) {
    return option(static_cast<char>(std::toupper(static_cast<unsigned char>(text[0]))));
  }
  // "Unknown" is reserved for the no-answer state here, unlike parse_truth_value.
  if (lower(text) == "unknown") return unknown();
  if (auto v = parse_truth_value(text)) return truth(*v);
  return unknown();
}

bool is_symbolic(PromptVariant v) {
  return v == PromptVariant::SymbolicAided || v == PromptVariant::SymbolicAidedNoKB ||
         v == PromptVariant::SymbolicAidedNoValidate;
}

std::string_view to_string(PromptVariant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "standard";
}

std::optional<PromptVariant> parse_variant(std::string_view name) {
  const std::string n = lower(name);
  for (const auto& [variant, spelled] : kVariantNames) {
    if (spelled == n) return variant;
  }
  return std::nullopt;
}

}  // namespace sacot
