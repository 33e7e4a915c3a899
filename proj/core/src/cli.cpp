#include "adapt/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "adapt/errors.hpp"
#include "adapt/harness.hpp"

namespace adapt {

namespace {

namespace fs = std::filesystem;

struct RunFlags {
  std::string config;
  std::string strategy;
  std::optional<int> d_max;
  std::string tasks;
  std::string recipes;
  std::string out;
  std::optional<int> parallelism;
  std::optional<uint64_t> seed;
  std::string backend_executor;
  std::string backend_planner;
  std::string split;
  std::optional<int> limit;
  std::string prompts;
  bool record_tree = false;
  std::vector<std::string> settings;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "INI run configuration");
    cmd->add_option("--strategy", strategy,
                    "adapt | executor_only | plan_and_execute | try_again");
    cmd->add_option("--d-max", d_max, "maximum decomposition depth");
    cmd->add_option("--tasks", tasks, "task records (JSONL)");
    cmd->add_option("--recipes", recipes, "recipe data directory");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--parallelism", parallelism, "concurrent episodes");
    cmd->add_option("--seed", seed, "task generation seed");
    cmd->add_option("--backend-executor", backend_executor,
                    "kind[,key=value...], e.g. scripted,competence=1");
    cmd->add_option("--backend-planner", backend_planner, "same form as --backend-executor");
    cmd->add_option("--split", split, "dev | test | all");
    cmd->add_option("--limit", limit, "run only the first N tasks");
    cmd->add_option("--prompts", prompts, "directory of prompt template overrides");
    cmd->add_flag("--record-tree", record_tree, "write a decomposition trace per episode");
    cmd->add_option("--set", settings, "section.key=value override (repeatable)");
  }

  RunConfig build() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
    for (const auto& s : settings) {
      auto dot = s.find('.');
      auto eq = s.find('=');
      if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
        throw ConfigError("--set expects section.key=value, got '" + s + "'");
      }
      apply_setting(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1), s.substr(eq + 1));
    }
    if (!strategy.empty()) cfg.strategy.strategy = strategy_from_string(strategy);
    if (d_max) cfg.strategy.controller.d_max = *d_max;
    if (!tasks.empty()) cfg.tasks = tasks;
    if (!recipes.empty()) cfg.recipes = recipes;
    if (!out.empty()) cfg.out_dir = out;
    if (parallelism) cfg.parallelism = *parallelism;
    if (seed) cfg.seed = *seed;
    if (!backend_executor.empty()) {
      cfg.executor_backend = parse_backend_spec(backend_executor, cfg.executor_backend);
    }
    if (!backend_planner.empty()) {
      cfg.planner_backend = parse_backend_spec(backend_planner, cfg.planner_backend);
    }
    if (!split.empty()) apply_setting(cfg, "run", "split", split);
    if (limit) cfg.limit = *limit;
    if (!prompts.empty()) cfg.prompts_dir = prompts;
    if (record_tree) cfg.record_tree = true;
    cfg.validate();
    return cfg;
  }
};

std::shared_ptr<const textcraft::RecipeBook> open_book(const std::string& dir) {
  fs::path p = dir.empty() ? textcraft::bundled_minibook_dir() : fs::path(dir);
  if (!fs::is_directory(p)) throw ConfigError("recipe directory not found: " + p.string());
  textcraft::LoadReport report;
  auto book = std::make_shared<const textcraft::RecipeBook>(textcraft::load_recipes(p, &report));
  spdlog::info("loaded {} recipes ({} other types skipped, {} malformed)", report.loaded,
               report.skipped_other_type, report.malformed);
  return book;
}

int cmd_run(const RunFlags& flags) {
  RunConfig cfg = flags.build();
  ExperimentReport report = run_experiment(cfg);
  spdlog::info("{} episodes run, {} already recorded", report.executed, report.skipped);
  if (report.records.empty()) {
    std::cout << "no tasks\n";
    return 0;
  }
  std::string text = format_summary(summarize(report.records));
  std::ofstream(cfg.out_dir / "summary.txt") << text;
  std::cout << text;
  return 0;
}

int cmd_sweep(const RunFlags& flags, int max_depth) {
  if (max_depth < 1) throw ConfigError("--max must be >= 1");
  RunConfig base = flags.build();
  fs::path root = base.out_dir;
  fs::create_directories(root);
  std::ofstream csv(root / "sweep.csv");
  csv << "d_max,episodes,success_rate,self_reported_rate,mean_calls,mean_k_max\n";
  std::cout << "d_max  success  self   calls   k_max\n";
  for (int d = 1; d <= max_depth; ++d) {
    RunConfig cfg = base;
    cfg.strategy.controller.d_max = d;
    cfg.out_dir = root / ("d" + std::to_string(d));
    auto report = run_experiment(cfg);
    if (report.records.empty()) throw EmptyInput("no tasks to sweep over");
    MetricsSummary m = summarize(report.records);
    std::ofstream(cfg.out_dir / "summary.txt") << format_summary(m);
    csv << d << ',' << m.episodes << ',' << m.success_rate << ',' << m.self_reported_rate
        << ',' << m.mean_calls << ',' << m.mean_k_max << '\n';
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-6d %-8.1f %-6.1f %-7.2f %.2f\n", d, m.success_rate,
                  m.self_reported_rate, m.mean_calls, m.mean_k_max);
    std::cout << buf;
  }
  return 0;
}

int cmd_summarize(const std::vector<std::string>& paths, bool canonical) {
  std::vector<RunRecord> all;
  for (const auto& p : paths) {
    fs::path f = fs::is_directory(p) ? fs::path(p) / "results.jsonl" : fs::path(p);
    auto recs = load_records(f);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  if (canonical) {
    std::cout << canonicalize(all);
  } else {
    std::cout << format_summary(summarize(all));
  }
  return 0;
}

struct GenFlags {
  std::string recipes;
  std::string out;
  uint64_t seed = 0;
  int min_depth = 1;
  int max_depth = 4;
  int max_distractors = 10;
  int depth2_quota = 77;
  std::vector<std::string> targets;
};

int cmd_gen_tasks(const GenFlags& f) {
  auto book = open_book(f.recipes);
  std::vector<textcraft::TaskInstance> tasks;
  if (!f.targets.empty()) {
    for (const auto& raw : f.targets) {
      auto name = book->resolve_name(raw);
      if (!name) throw ConfigError("unknown item '" + raw + "'");
      tasks.push_back(textcraft::build_task(*name, *book, f.seed, f.max_distractors));
    }
  } else {
    tasks = textcraft::generate_tasks(
        *book, {f.min_depth, f.max_depth, f.seed, f.depth2_quota, f.max_distractors});
  }
  if (f.out.empty()) {
    for (const auto& t : tasks) std::cout << textcraft::to_jsonl(t) << '\n';
  } else {
    textcraft::save_tasks(f.out, tasks);
  }
  std::map<std::pair<std::string, int>, int> counts;
  for (const auto& t : tasks) ++counts[{std::string(textcraft::to_string(t.split)), t.depth}];
  std::cerr << tasks.size() << " tasks\n";
  for (const auto& [key, n] : counts) {
    std::cerr << "  " << key.first << " depth " << key.second << ": " << n << '\n';
  }
  std::cerr << "craftable items by depth:";
  for (const auto& [d, n] : textcraft::depth_histogram(*book)) {
    std::cerr << ' ' << d << '=' << n;
  }
  std::cerr << '\n';
  return 0;
}

int cmd_oracle(const std::string& recipes, const std::string& target, uint64_t seed) {
  auto book = open_book(recipes);
  auto name = book->resolve_name(target);
  if (!name) throw ConfigError("unknown item '" + target + "'");
  textcraft::TaskInstance task = textcraft::build_task(*name, *book, seed);
  textcraft::TextCraftEnv env(book, task);
  std::cout << env.reset() << "\n\n";
  for (const auto& action : textcraft::oracle_solve(task, *book)) {
    std::cout << "> " << action << '\n' << env.step(action) << '\n';
  }
  std::cout << "\nreward: " << env.gold_reward() << '\n';
  return env.gold_reward() == 1 ? 0 : 1;
}

void setup_logging(int verbosity, bool quiet) {
  auto logger = spdlog::get("adapt");
  if (!logger) logger = spdlog::stderr_color_mt("adapt");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  if (quiet) {
    spdlog::set_level(spdlog::level::warn);
  } else if (verbosity >= 2) {
    spdlog::set_level(spdlog::level::trace);
  } else if (verbosity == 1) {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"ADaPT: as-needed decomposition and planning for LLM agents"};
  app.require_subcommand(1);
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "more logging (repeatable)");
  app.add_flag("-q,--quiet", quiet, "warnings and errors only");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run one strategy over a task set");
  run_flags.attach(run);

  RunFlags sweep_flags;
  int sweep_max = 4;
  auto* sweep = app.add_subcommand("sweep-depth", "run for d_max = 1..N and emit curve data");
  sweep_flags.attach(sweep);
  sweep->add_option("--max", sweep_max, "largest d_max");

  std::vector<std::string> summary_paths;
  bool canonical = false;
  auto* summ = app.add_subcommand("summarize", "aggregate results files");
  summ->add_option("results", summary_paths, "results.jsonl files or run directories")
      ->required();
  summ->add_flag("--canonical", canonical, "print sorted records without wall times");

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-tasks", "build TextCraft task records");
  gen_cmd->add_option("--recipes", gen.recipes, "recipe data directory");
  gen_cmd->add_option("--out", gen.out, "output JSONL (stdout when omitted)");
  gen_cmd->add_option("--seed", gen.seed, "generation seed");
  gen_cmd->add_option("--min-depth", gen.min_depth);
  gen_cmd->add_option("--max-depth", gen.max_depth);
  gen_cmd->add_option("--max-distractors", gen.max_distractors);
  gen_cmd->add_option("--depth2-quota", gen.depth2_quota, "depth-2 tasks placed in test");
  gen_cmd->add_option("--target", gen.targets, "only these targets (repeatable)");

  std::string oracle_recipes, oracle_target;
  uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "print and replay the gold trajectory");
  oracle->add_option("--recipes", oracle_recipes, "recipe data directory");
  oracle->add_option("--target", oracle_target, "item to craft")->required();
  oracle->add_option("--seed", oracle_seed, "task seed");

  for (auto* sub : {run, sweep, summ, gen_cmd, oracle}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  setup_logging(verbosity, quiet);

  try {
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_max);
    if (*summ) return cmd_summarize(summary_paths, canonical);
    if (*gen_cmd) return cmd_gen_tasks(gen);
    if (*oracle) return cmd_oracle(oracle_recipes, oracle_target, oracle_seed);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const EmptyInput& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const NoSolution& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 2;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage(args);
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  argv.push_back(nullptr);
  return cli_main(static_cast<int>(storage.size()), argv.data());
}

}  // namespace adapt
