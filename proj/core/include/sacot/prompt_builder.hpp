#pragma once

// Few-shot prompt assembly for Standard, CoT and Symbolic-Aided CoT prompting
// plus the two symbolic ablations (no KB tracking, no Validate function).

#include <string>
#include <string_view>
#include <vector>

#include "sacot/answer.hpp"
#include "sacot/instance.hpp"

namespace sacot {

inline constexpr std::string_view kSymbolicInstruction =
    "### Let us define F as a function that infers new premises based on a given list of facts and rules. "
    "Using these facts and rules, provide a reasoning path that leads to one of the values of a Validate "
    "function: True, False, or Uncertain.";
inline constexpr std::string_view kSeparator = "------";
inline constexpr std::string_view kDefaultOptions = "A) True B) False C) Uncertain";

/// Default number of few-shot demonstrations.
inline constexpr std::size_t kDefaultShots = 2;

struct Demonstration {
  Instance instance;
  /// Trace text for symbolic variants, reasoning JSON for CoT, answer JSON for Standard.
  std::string solution_text;
  Answer answer;
};

struct PromptText {
  std::string text;
  PromptVariant variant = PromptVariant::Standard;
  std::string instance_id;
};

/// Throws MissingDemonstrations when `demos` is empty and UntaggedRules when a
/// symbolic prompt is requested for an instance without tagged rules.
PromptText build_prompt(PromptVariant variant, const std::vector<Demonstration>& demos, const Instance& instance);

/// Oracle-generated demonstration. Throws OracleUnsolvable when the oracle
/// cannot solve the instance or disagrees with its gold label.
Demonstration make_demonstration(const Instance& instance, PromptVariant variant);

/// Ablation filters on symbolic text.
std::string remove_kb_lines(std::string_view text);
std::string replace_validate_line(std::string_view text);

/// Symbolic trace text for `variant` (applies the ablation filters).
std::string symbolic_solution(const std::string& full_trace_text, PromptVariant variant);

struct DemoSet {
  Dataset dataset = Dataset::ProofWriter;
  PromptVariant variant = PromptVariant::SymbolicAided;
  std::vector<Demonstration> demos;
};

/// Demonstration files: {dataset, variant, demos: [{instance_id, context, question, solution_text, answer}]}.
DemoSet load_demonstrations(const std::string& path);
void save_demonstrations(const DemoSet& set, const std::string& path);
std::string demonstrations_to_json(const DemoSet& set);
DemoSet demonstrations_from_json(std::string_view json);

/// Re-targets demonstrations at another variant. Entries whose stored
/// solution is for a different variant are regenerated with the oracle.
std::vector<Demonstration> adapt_demonstrations(const DemoSet& set, PromptVariant variant);

/// Built-in held-out instances used as the default few-shot set.
std::vector<Instance> default_demo_instances(Dataset dataset);
/// First `k` oracle demonstrations over default_demo_instances. Throws
/// MissingDemonstrations for datasets without built-in demonstrations.
std::vector<Demonstration> default_demonstrations(Dataset dataset, PromptVariant variant, std::size_t k = kDefaultShots);

/// Picks up to `k` oracle-solvable instances, preferring to cover distinct gold answers.
std::vector<Demonstration> select_demonstrations(const std::vector<Instance>& pool, PromptVariant variant,
                                                 std::size_t k);

}  // namespace sacot
