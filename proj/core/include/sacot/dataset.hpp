#pragma once

// Benchmark loading. Accepted layouts:
//   * normalized JSONL, one {id, dataset, context, question, options?, answer} per line;
//   * a JSON array of {id, context, question, options, answer} records with
//     lettered options ("A) True"), as distributed for ProofWriter, ProntoQA,
//     FOLIO and LogicalDeduction evaluation subsets;
//   * ProofWriter's native JSONL ({id, theory, questions: {Q1: {question, answer}}}).

#include <string>
#include <string_view>
#include <vector>

#include "sacot/instance.hpp"

namespace sacot {

/// Throws FileNotFound, or SchemaMismatch naming the first offending record.
std::vector<Instance> load_dataset(const std::string& path, Dataset dataset);
std::vector<Instance> parse_dataset_text(std::string_view text, Dataset dataset);

/// Normalized JSONL record for one instance.
std::string to_jsonl_record(const Instance& instance);
void save_dataset(const std::vector<Instance>& instances, const std::string& path);

}  // namespace sacot
