#pragma once

// Experiment orchestration: run a strategy over a task set on a worker
// pool, append one JSON line per episode, resume from an existing results
// file, and aggregate metrics.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adapt/baselines.hpp"
#include "adapt/llm_backend.hpp"
#include "adapt/prompts.hpp"
#include "adapt/textcraft.hpp"

namespace adapt {

struct RunConfig {
  std::string environment = "textcraft";
  /// Task records (JSONL). Empty means generate from the recipe book.
  std::filesystem::path tasks;
  /// Recipe data directory. Empty means the bundled mini-book.
  std::filesystem::path recipes;
  std::optional<textcraft::Split> split;
  textcraft::TaskGenOptions task_gen{1, 4, 0, 77, 10};
  /// Stop after this many tasks from the list (before resume skipping).
  std::optional<int> limit;

  StrategyConfig strategy;
  BackendConfig executor_backend;
  BackendConfig planner_backend;
  std::filesystem::path prompts_dir;

  int parallelism = 1;
  std::filesystem::path out_dir = "results";
  uint64_t seed = 0;
  bool record_tree = false;

  /// Throws ConfigError.
  void validate() const;
};

/// INI file with [run], [strategy], [executor_backend] and
/// [planner_backend] sections. Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies one `section.key = value` setting. Throws ConfigError.
void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value);

/// "kind[,key=value...]", e.g. "scripted,competence=2" or
/// "http_chat,model=m,endpoint=http://host/v1/chat/completions".
BackendConfig parse_backend_spec(const std::string& spec, BackendConfig base = {});

struct RunRecord {
  std::string task_id;
  std::string strategy;
  int d_max = 1;
  int depth = 0;
  std::string split;
  int gold_reward = 0;
  bool self_reported_success = false;
  int k_max = 0;
  int total_calls = 0;
  int executor_calls = 0;
  int planner_calls = 0;
  int transport_attempts = 0;
  int call_ceiling = 0;
  int trials = 1;
  double wall_ms = 0.0;
  std::string trace_path;
  std::optional<std::string> error;

  std::string to_jsonl() const;
  /// Throws ConfigError.
  static RunRecord from_jsonl(const std::string& line);
};

std::vector<RunRecord> load_records(const std::filesystem::path& path);

struct ExperimentReport {
  std::vector<RunRecord> records;  // previously recorded and new, file order
  int executed = 0;
  int skipped = 0;
  std::filesystem::path results_path;
};

/// Task list for `cfg`: loaded or generated, split-filtered, limited.
std::vector<textcraft::TaskInstance> resolve_tasks(const RunConfig& cfg,
                                                   const textcraft::RecipeBook& book);

/// Runs every task not already present in <out_dir>/results.jsonl.
/// Per-task failures become records with `error` set.
ExperimentReport run_experiment(const RunConfig& cfg);

/// Runs one task in isolation; `ordinal` is its position in the task list.
RunRecord run_episode(const RunConfig& cfg,
                      std::shared_ptr<const textcraft::RecipeBook> book,
                      const textcraft::TaskInstance& task, uint64_t ordinal,
                      const PromptLibrary* prompts = nullptr,
                      EpisodeResult* episode = nullptr);

struct DepthSummary {
  int episodes = 0;
  double success_rate = 0.0;
  double mean_k_max = 0.0;
  /// Over solved episodes only; 0 when none.
  double mean_k_max_solved = 0.0;
};

struct MetricsSummary {
  int episodes = 0;
  double success_rate = 0.0;
  double self_reported_rate = 0.0;
  /// self_reported_rate - success_rate, in points.
  double heuristic_gap = 0.0;
  double mean_calls = 0.0;
  double mean_executor_calls = 0.0;
  double mean_planner_calls = 0.0;
  double mean_k_max = 0.0;
  int errors = 0;
  int budget_violations = 0;
  std::map<int, DepthSummary> per_depth;
};

/// Throws EmptyInput.
MetricsSummary summarize(const std::vector<RunRecord>& records);

std::string format_summary(const MetricsSummary& m);

/// Results sorted by task id with wall times removed, for comparing runs.
std::string canonicalize(const std::vector<RunRecord>& records);

}  // namespace adapt
