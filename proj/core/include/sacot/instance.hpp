#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sacot/answer.hpp"
#include "sacot/rule_language.hpp"

namespace sacot {

enum class Dataset { ProofWriter, ProntoQA, LogicalDeduction, FOLIO };

std::string_view to_string(Dataset d);
std::optional<Dataset> parse_dataset(std::string_view name);

/// Datasets answered with True/False/Uncertain (and scored with a confusion matrix).
bool is_three_way(Dataset d);

/// One benchmark problem.
struct Instance {
  std::string id;
  Dataset dataset = Dataset::ProofWriter;
  std::string context;
  std::vector<Rule> rules;
  Question question;
  Answer gold;
  /// Parse warnings (opaque sentences, unparsed question).
  std::vector<std::string> warnings;
  /// False when the question could not be parsed into a literal or options.
  bool question_parsed = true;

  bool is_statement_query() const noexcept {
    return question_parsed && question.kind == Question::Kind::Statement && question.literal.has_value();
  }
  bool fully_parsed() const noexcept;
  /// Within the oracle's reach: a parsed statement query over fully parsed rules.
  bool oracle_solvable() const noexcept;
  const Rule* find_rule(int tag) const noexcept;
};

/// Builds an instance from raw text, tagging the context sentences. Parse
/// failures degrade to opaque rules / an unparsed question, never an exception.
Instance make_instance(std::string id, Dataset dataset, std::string context, std::string question_text,
                       std::vector<std::string> options, Answer gold);

/// Reads a gold label: "True"/"False"/"Uncertain"/"Unknown", or an option
/// letter ("A", "B) False"). Three-way datasets resolve letters through
/// `options` (or A/B/C = True/False/Uncertain); LogicalDeduction keeps the
/// letter. Returns Unknown for labels that are not legal for the dataset.
Answer parse_gold_label(std::string_view label, Dataset dataset, const std::vector<std::string>& options = {});

/// Strips an "A) " / "(A) " prefix from an option text.
std::string strip_option_prefix(std::string_view option);

}  // namespace sacot
