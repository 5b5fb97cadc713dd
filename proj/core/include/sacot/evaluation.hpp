#pragma once

// Scoring loop: prompt, query (or oracle substitute), extract, score, verify.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sacot/answer.hpp"
#include "sacot/instance.hpp"
#include "sacot/model_client.hpp"
#include "sacot/prompt_builder.hpp"
#include "sacot/verifier.hpp"

namespace sacot {

struct InstanceResult {
  std::string id;
  std::string prompt_hash;
  std::string raw_output;
  Answer extracted_answer;
  Answer gold;
  bool correct = false;
  std::optional<VerificationReport> verification;
  /// Non-empty when the instance could not be evaluated (endpoint failure).
  std::string error;

  friend bool operator==(const InstanceResult&, const InstanceResult&) = default;
};

/// Rows gold, columns predicted, order True/False/Uncertain; column 3 holds
/// Unknown predictions.
struct ConfusionMatrix {
  static constexpr std::size_t kSpill = 3;
  std::array<std::array<std::size_t, 4>, 3> counts{};

  void add(TruthValue gold, const Answer& predicted);
  std::size_t total() const noexcept;
  std::size_t diagonal() const noexcept;
  std::size_t row_sum(TruthValue gold) const noexcept;
  std::size_t spill() const noexcept;
  /// Diagonal over row sum; nullopt for an empty row.
  std::optional<double> recall(TruthValue gold) const noexcept;
  /// No off-diagonal or spill mass.
  bool is_diagonal() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(const std::vector<InstanceResult>& results);

struct EvalReport {
  std::string run_id;
  std::string created_at;
  nlohmann::json config_echo = nlohmann::json::object();
  Dataset dataset = Dataset::ProofWriter;
  PromptVariant variant = PromptVariant::Standard;
  std::vector<InstanceResult> per_instance;
  double accuracy = 0.0;
  /// Present for three-way datasets only.
  std::optional<ConfusionMatrix> confusion;
  ErrorHistogram error_histogram;
  /// Set when at least one instance failed to evaluate.
  bool partial = false;

  std::size_t correct_count() const noexcept;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct EvalOptions {
  /// Substitute the oracle for the model; no network.
  bool offline = false;
  /// Required unless offline.
  ResponseCache* cache = nullptr;
  /// Called after each instance finishes (from worker threads).
  std::function<void(const InstanceResult&)> on_result;
};

/// Oracle output in the format the variant asks for, or "" when the oracle
/// cannot solve the instance.
std::string oracle_output(const Instance& instance, PromptVariant variant);

/// Scores one raw output. Symbolic variants are also verified.
InstanceResult score_output(const Instance& instance, PromptVariant variant, std::string raw_output);

/// Recomputes accuracy, confusion and the error histogram from per_instance.
void aggregate(EvalReport& report);

/// Evaluates `instances`, up to config.max_parallel at a time. Results are
/// ordered by instance id regardless of scheduling.
EvalReport run_eval(const std::vector<Instance>& instances, PromptVariant variant,
                    const std::vector<Demonstration>& demos, const ModelEndpointConfig& config,
                    const EvalOptions& options);

}  // namespace sacot
