#pragma once

// Step-by-step checking of symbolic traces against an instance's rules, and
// classification of failures into the four reasoning error classes:
// hallucinated inference rules, unstoppable inference flow, failure on cyclic
// inference graphs, and rule matching errors.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sacot/answer.hpp"
#include "sacot/instance.hpp"
#include "sacot/reasoner.hpp"
#include "sacot/trace.hpp"

namespace sacot {

struct StepVerdict {
  enum class Status { Valid, HallucinatedRule, RuleMatchError, KBUpdateError, RedundantReinference };

  /// Index into Trace::steps; the Validate step uses steps.size().
  std::size_t step_index = 0;
  Status status = Status::Valid;
  std::string detail;

  friend bool operator==(const StepVerdict&, const StepVerdict&) = default;
};

std::string_view to_string(StepVerdict::Status s);

enum class ErrorClass { HallucinatedRule, UnstoppableFlow, CyclicInference, RuleMatchError };

inline constexpr std::array<ErrorClass, 4> kErrorClasses{
    ErrorClass::HallucinatedRule, ErrorClass::UnstoppableFlow, ErrorClass::CyclicInference,
    ErrorClass::RuleMatchError};

std::string_view to_string(ErrorClass c);
/// Human-readable label, e.g. "Hallucinated Inference Rules".
std::string_view label(ErrorClass c);

struct VerificationReport {
  std::string instance_id;
  std::vector<StepVerdict> step_verdicts;
  bool halted = false;
  bool cyclic = false;
  bool validate_consistent = false;
  bool final_answer_correct = false;
  /// False when rule semantics could not be checked (FOLIO, opaque rules, unparsed question).
  bool semantic_checked = true;
  /// Multiset of error classes, in detection order.
  std::vector<ErrorClass> error_classes;

  bool clean() const noexcept { return error_classes.empty(); }

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

/// Counts per error class, indexed in kErrorClasses order.
struct ErrorHistogram {
  std::array<std::size_t, 4> counts{};

  std::size_t operator[](ErrorClass c) const { return counts[static_cast<std::size_t>(c)]; }
  std::size_t& operator[](ErrorClass c) { return counts[static_cast<std::size_t>(c)]; }
  std::size_t total() const noexcept;
  ErrorHistogram& operator+=(const ErrorHistogram& other);

  friend bool operator==(const ErrorHistogram&, const ErrorHistogram&) = default;
};

VerificationReport verify_trace(const Instance& instance, const Trace& trace);

/// True iff `claimed` is the open-world answer of `question` over `kb`.
bool check_validate_step(const KnowledgeBase& kb, const Literal& question, TruthValue claimed);

ErrorHistogram classify_errors(const VerificationReport& report);

}  // namespace sacot
