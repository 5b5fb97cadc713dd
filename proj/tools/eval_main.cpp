// eval: command-line front end for prompting runs, trace verification,
// demonstration generation and synthetic data.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sacot/dataset.hpp"
#include "sacot/error.hpp"
#include "sacot/evaluation.hpp"
#include "sacot/model_client.hpp"
#include "sacot/prompt_builder.hpp"
#include "sacot/report.hpp"
#include "sacot/synth.hpp"
#include "sacot/trace.hpp"
#include "sacot/verifier.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sacot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

Dataset dataset_or_throw(const std::string& name) {
  if (auto d = parse_dataset(name)) return *d;
  throw Error("unknown dataset '" + name + "' (proofwriter, prontoqa, logicaldeduction, folio)");
}

PromptVariant variant_or_throw(const std::string& name) {
  if (auto v = parse_variant(name)) return *v;
  throw Error("unknown variant '" + name + "' (standard, cot, symbolic, symbolic-nokb, symbolic-novalidate)");
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FileNotFound(p.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct RunArgs {
  std::string dataset;
  std::string data;
  std::vector<std::string> variants{"symbolic"};
  std::string demos;
  std::size_t k = kDefaultShots;
  std::string endpoint = "http://localhost:8000/v1";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  bool offline = false;
  std::string out;
  int max_parallel = 4;
  std::string cache;
  int max_tokens = 2048;
  int timeout = 120;
  int retries = 3;
};

std::vector<Demonstration> demonstrations_for(const RunArgs& args, Dataset dataset, PromptVariant variant) {
  if (!args.demos.empty()) {
    const DemoSet set = load_demonstrations(args.demos);
    return adapt_demonstrations(set, variant);
  }
  return default_demonstrations(dataset, variant, args.k);
}

int run_command(const RunArgs& args) {
  const Dataset dataset = dataset_or_throw(args.dataset);
  std::vector<PromptVariant> variants;
  for (const auto& v : args.variants) variants.push_back(variant_or_throw(v));
  if (!args.offline && args.model.empty()) throw Error("--model is required unless --offline is given");

  const auto instances = load_dataset(args.data, dataset);
  fs::create_directories(args.out);

  ModelEndpointConfig config;
  config.base_url = args.endpoint;
  config.model_name = args.model;
  config.api_key_env = args.api_key_env;
  config.max_output_tokens = args.max_tokens;
  config.request_timeout_seconds = args.timeout;
  config.max_parallel = args.max_parallel;
  config.max_retries = args.retries;

  std::unique_ptr<ResponseCache> cache;
  if (!args.offline) {
    cache = std::make_unique<ResponseCache>(args.cache.empty() ? (fs::path(args.out) / "cache.jsonl").string()
                                                               : args.cache);
  }

  std::vector<EvalReport> reports;
  bool partial = false;
  for (PromptVariant variant : variants) {
    const auto demos = demonstrations_for(args, dataset, variant);
    const fs::path progress_path = fs::path(args.out) / ("progress-" + std::string(to_string(variant)) + ".jsonl");
    std::ofstream progress(progress_path, std::ios::trunc);

    EvalOptions options;
    options.offline = args.offline;
    options.cache = cache.get();
    options.on_result = [&progress](const InstanceResult& r) {
      progress << to_json(r).dump() << '\n';
      progress.flush();
    };
    EvalReport report = run_eval(instances, variant, demos, config, options);
    report.config_echo["data"] = args.data;
    report.config_echo["demos"] = args.demos.empty() ? "built-in" : args.demos;

    std::printf("%-12s %-20s n=%zu correct=%zu accuracy=%.3f%s\n", std::string(to_string(dataset)).c_str(),
                std::string(to_string(variant)).c_str(), report.per_instance.size(), report.correct_count(),
                report.accuracy, report.partial ? " (partial)" : "");
    partial = partial || report.partial;
    reports.push_back(std::move(report));
  }
  for (const auto& path : emit_report(reports, args.out)) std::printf("wrote %s\n", path.c_str());
  return partial ? kExitPartial : kExitOk;
}

// Traces come from a JSONL file of {id, output_text} or a directory of <id>.txt files.
std::map<std::string, std::string> load_traces(const std::string& path) {
  std::map<std::string, std::string> traces;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) traces[entry.path().stem().string()] = read_file(entry.path());
    }
    return traces;
  }
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json record = json::parse(line);
      const std::string text =
          record.contains("output_text") ? record.at("output_text").get<std::string>() : record.at("raw_output").get<std::string>();
      traces[record.at("id").get<std::string>()] = text;
    } catch (const json::exception& e) {
      throw SchemaMismatch(index, std::string("trace record: ") + e.what());
    }
    ++index;
  }
  return traces;
}

int verify_command(const std::string& dataset_name, const std::string& data, const std::string& traces_path,
                   const std::string& out) {
  const Dataset dataset = dataset_or_throw(dataset_name);
  const auto instances = load_dataset(data, dataset);
  const auto traces = load_traces(traces_path);

  std::vector<VerificationReport> reports;
  json all = json::array();
  std::size_t missing = 0;
  for (const auto& inst : instances) {
    auto it = traces.find(inst.id);
    if (it == traces.end()) {
      ++missing;
      continue;
    }
    VerificationReport r = verify_trace(inst, parse_trace(it->second));
    all.push_back(to_json(r));
    reports.push_back(std::move(r));
  }
  fs::create_directories(out);
  std::ofstream(fs::path(out) / "verification.json") << all.dump(2) << '\n';
  std::ofstream(fs::path(out) / "verification.md") << render_markdown(reports);

  ErrorHistogram total;
  std::size_t clean = 0;
  for (const auto& r : reports) {
    total += classify_errors(r);
    clean += r.clean() ? 1 : 0;
  }
  std::printf("verified %zu traces (%zu clean, %zu instances without a trace)\n", reports.size(), clean, missing);
  for (auto c : kErrorClasses) std::printf("  %-36s %zu\n", std::string(label(c)).c_str(), total[c]);
  return missing == 0 ? kExitOk : kExitPartial;
}

int demo_gen_command(const std::string& dataset_name, const std::string& data, std::size_t k,
                     const std::string& variant_name, const std::string& out) {
  DemoSet set;
  set.dataset = dataset_or_throw(dataset_name);
  set.variant = variant_or_throw(variant_name);
  set.demos = select_demonstrations(load_dataset(data, set.dataset), set.variant, k);
  if (set.demos.empty()) throw OracleUnsolvable("no instance in " + data + " is solvable by the oracle");
  save_demonstrations(set, out);
  std::printf("wrote %zu demonstrations to %s\n", set.demos.size(), out.c_str());
  return set.demos.size() == k ? kExitOk : kExitPartial;
}

int gen_command(std::size_t n, std::uint64_t seed, const SynthConfig& config, const std::string& out) {
  const auto instances = generate_instances(n, seed, config);
  if (const auto parent = fs::path(out).parent_path(); !parent.empty()) fs::create_directories(parent);
  save_dataset(instances, out);
  std::printf("wrote %zu instances to %s\n", instances.size(), out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic-aided chain-of-thought evaluation toolkit"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Prompt a model (or the oracle) over a dataset and score it");
  run_cmd->add_option("--dataset", run.dataset, "proofwriter | prontoqa | logicaldeduction | folio")->required();
  run_cmd->add_option("--data", run.data, "Dataset file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--variant", run.variants, "Prompt variant(s); repeat or comma-separate")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--demos", run.demos, "Demonstration file (default: built-in set)")->check(CLI::ExistingFile);
  run_cmd->add_option("--k", run.k, "Number of built-in demonstrations")->capture_default_str();
  run_cmd->add_option("--endpoint", run.endpoint, "OpenAI-compatible base URL")->capture_default_str();
  run_cmd->add_option("--model", run.model, "Model name");
  run_cmd->add_option("--api-key-env", run.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  run_cmd->add_flag("--offline", run.offline, "Use the oracle instead of a model");
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--max-parallel", run.max_parallel, "Concurrent requests")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--cache", run.cache, "Response cache (default: <out>/cache.jsonl)");
  run_cmd->add_option("--max-tokens", run.max_tokens, "Maximum output tokens")->capture_default_str();
  run_cmd->add_option("--timeout", run.timeout, "Request timeout in seconds")->capture_default_str();
  run_cmd->add_option("--retries", run.retries, "Retries per request")->capture_default_str();

  std::string verify_dataset = "proofwriter";
  std::string verify_data;
  std::string verify_traces;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Check symbolic traces step by step and classify errors");
  verify_cmd->add_option("--dataset", verify_dataset, "Dataset name")->capture_default_str();
  verify_cmd->add_option("--data", verify_data, "Dataset file")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--traces", verify_traces, "JSONL of {id, output_text} or a directory of <id>.txt")
      ->required()
      ->check(CLI::ExistingPath);
  verify_cmd->add_option("--out", verify_out, "Output directory")->required();

  std::string demo_dataset = "proofwriter";
  std::string demo_data;
  std::size_t demo_k = kDefaultShots;
  std::string demo_variant = "symbolic";
  std::string demo_out;
  auto* demo_cmd = app.add_subcommand("demo-gen", "Generate oracle demonstrations from a dataset");
  demo_cmd->add_option("--dataset", demo_dataset, "Dataset name")->capture_default_str();
  demo_cmd->add_option("--data", demo_data, "Dataset file")->required()->check(CLI::ExistingFile);
  demo_cmd->add_option("--k", demo_k, "Number of demonstrations")->capture_default_str();
  demo_cmd->add_option("--variant", demo_variant, "Prompt variant")->capture_default_str();
  demo_cmd->add_option("--out", demo_out, "Output JSON file")->required();

  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 1;
  SynthConfig gen_config;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen", "Write random ProofWriter-style instances as JSONL");
  gen_cmd->add_option("--n", gen_n, "Number of instances")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--max-constants", gen_config.max_constants, "Constants per instance")
      ->capture_default_str()
      ->check(CLI::Range(1, 8));
  gen_cmd->add_option("--max-rules", gen_config.max_rules, "Sentences per instance")->capture_default_str();
  gen_cmd->add_option("--max-conditions", gen_config.max_conditions, "Conditions per rule")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output JSONL file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_command(run);
    if (*verify_cmd) return verify_command(verify_dataset, verify_data, verify_traces, verify_out);
    if (*demo_cmd) return demo_gen_command(demo_dataset, demo_data, demo_k, demo_variant, demo_out);
    if (*gen_cmd) return gen_command(gen_n, gen_seed, gen_config, gen_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "eval: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
