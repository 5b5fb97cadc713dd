#pragma once

// Random ProofWriter-style instances for property tests and offline runs.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "sacot/instance.hpp"

namespace sacot {

struct SynthConfig {
  std::size_t max_constants = 8;
  std::size_t max_rules = 20;
  std::size_t max_conditions = 2;
  /// Probability that a generated literal is negative.
  double negation_rate = 0.3;
  /// Probability that an implication is ground (no variable).
  double ground_rule_rate = 0.15;
  /// Skip instances whose query is contradicted by the closure.
  bool skip_ambiguous = true;
};

/// One random instance whose context is rendered to text and re-parsed;
/// gold comes from the forward closure. Queries cycle True/False/Uncertain by
/// `index` when the closure allows it.
Instance generate_instance(std::mt19937_64& rng, const SynthConfig& config, std::size_t index);

/// `n` instances with ids synth-0000.. from a fixed seed.
std::vector<Instance> generate_instances(std::size_t n, std::uint64_t seed, const SynthConfig& config = {});

}  // namespace sacot
