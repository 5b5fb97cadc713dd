#include "sacot/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <ctime>
#include <mutex>
#include <thread>

#include "sacot/error.hpp"
#include "sacot/trace.hpp"

namespace sacot {

namespace {

std::size_t truth_index(TruthValue v) { return static_cast<std::size_t>(v); }

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json echo_config(const ModelEndpointConfig& config, const EvalOptions& options, PromptVariant variant,
                           Dataset dataset, std::size_t n_demos) {
  nlohmann::json j;
  j["dataset"] = std::string(to_string(dataset));
  j["variant"] = std::string(to_string(variant));
  j["offline"] = options.offline;
  j["demonstrations"] = n_demos;
  j["base_url"] = options.offline ? "" : config.base_url;
  j["model_name"] = options.offline ? "oracle" : config.model_name;
  j["api_key_env"] = config.api_key_env;
  j["temperature"] = config.temperature;
  j["max_output_tokens"] = config.max_output_tokens;
  j["request_timeout"] = config.request_timeout_seconds;
  j["max_parallel"] = config.max_parallel;
  j["max_retries"] = config.max_retries;
  j["cache"] = options.cache ? options.cache->path() : "";
  return j;
}

}  // namespace

void ConfusionMatrix::add(TruthValue gold, const Answer& predicted) {
  auto& row = counts[truth_index(gold)];
  if (predicted.is_truth()) {
    ++row[truth_index(predicted.truth_value())];
  } else {
    ++row[kSpill];
  }
}

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

std::size_t ConfusionMatrix::diagonal() const noexcept { return counts[0][0] + counts[1][1] + counts[2][2]; }

std::size_t ConfusionMatrix::row_sum(TruthValue gold) const noexcept {
  std::size_t n = 0;
  for (auto c : counts[truth_index(gold)]) n += c;
  return n;
}

std::size_t ConfusionMatrix::spill() const noexcept {
  return counts[0][kSpill] + counts[1][kSpill] + counts[2][kSpill];
}

std::optional<double> ConfusionMatrix::recall(TruthValue gold) const noexcept {
  const std::size_t n = row_sum(gold);
  if (n == 0) return std::nullopt;
  return static_cast<double>(counts[truth_index(gold)][truth_index(gold)]) / static_cast<double>(n);
}

bool ConfusionMatrix::is_diagonal() const noexcept { return diagonal() == total(); }

ConfusionMatrix confusion_matrix(const std::vector<InstanceResult>& results) {
  ConfusionMatrix m;
  for (const auto& r : results) {
    if (r.gold.is_truth()) m.add(r.gold.truth_value(), r.extracted_answer);
  }
  return m;
}

std::size_t EvalReport::correct_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(per_instance.begin(), per_instance.end(), [](const InstanceResult& r) { return r.correct; }));
}

std::string oracle_output(const Instance& instance, PromptVariant variant) {
  if (!instance.oracle_solvable()) return {};
  Instance blind = instance;
  blind.gold = Answer::unknown();
  try {
    return make_demonstration(blind, variant).solution_text;
  } catch (const Error&) {
    return {};
  }
}

InstanceResult score_output(const Instance& instance, PromptVariant variant, std::string raw_output) {
  InstanceResult r;
  r.id = instance.id;
  r.gold = instance.gold;
  r.raw_output = std::move(raw_output);
  r.extracted_answer = extract_answer(r.raw_output, variant, is_three_way(instance.dataset));
  r.correct = !r.extracted_answer.is_unknown() && r.extracted_answer == r.gold;
  if (is_symbolic(variant)) r.verification = verify_trace(instance, parse_trace(r.raw_output));
  return r;
}

void aggregate(EvalReport& report) {
  const std::size_t n = report.per_instance.size();
  report.accuracy = n == 0 ? 0.0 : static_cast<double>(report.correct_count()) / static_cast<double>(n);
  if (is_three_way(report.dataset)) {
    report.confusion = confusion_matrix(report.per_instance);
  } else {
    report.confusion.reset();
  }
  report.error_histogram = {};
  report.partial = false;
  for (const auto& r : report.per_instance) {
    if (r.verification) report.error_histogram += classify_errors(*r.verification);
    if (!r.error.empty()) report.partial = true;
  }
}

EvalReport run_eval(const std::vector<Instance>& instances, PromptVariant variant,
                    const std::vector<Demonstration>& demos, const ModelEndpointConfig& config,
                    const EvalOptions& options) {
  if (!options.offline && options.cache == nullptr) throw Error("run_eval needs a response cache unless offline");

  EvalReport report;
  report.created_at = utc_now();
  report.dataset = instances.empty() ? Dataset::ProofWriter : instances.front().dataset;
  report.variant = variant;
  report.config_echo = echo_config(config, options, variant, report.dataset, demos.size());
  report.run_id = sha256_hex(report.config_echo.dump() + report.created_at).substr(0, 12);

  std::vector<InstanceResult> results(instances.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      const Instance& inst = instances[i];
      InstanceResult r;
      std::string prompt_hash;
      try {
        const PromptText prompt = build_prompt(variant, demos, inst);
        prompt_hash = sha256_hex(prompt.text);
        std::string raw = options.offline ? oracle_output(inst, variant) : query_model(config, prompt, *options.cache);
        r = score_output(inst, variant, std::move(raw));
      } catch (const Error& e) {
        r = InstanceResult{};
        r.id = inst.id;
        r.gold = inst.gold;
        r.error = e.what();
      }
      r.prompt_hash = std::move(prompt_hash);
      if (options.on_result) {
        std::lock_guard lock(callback_mutex);
        options.on_result(r);
      }
      results[i] = std::move(r);
    }
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, config.max_parallel)), 1, std::max<std::size_t>(1, instances.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::stable_sort(results.begin(), results.end(),
                   [](const InstanceResult& a, const InstanceResult& b) { return a.id < b.id; });
  report.per_instance = std::move(results);
  aggregate(report);
  return report;
}

}  // namespace sacot
