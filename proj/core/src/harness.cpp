#include "adapt/harness.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <set>
#include <thread>

#include "adapt/errors.hpp"
#include "adapt/trace.hpp"

namespace adapt {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json record_json(const RunRecord& r, bool with_wall) {
  json j{{"task_id", r.task_id},
         {"strategy", r.strategy},
         {"d_max", r.d_max},
         {"depth", r.depth},
         {"split", r.split},
         {"gold_reward", r.gold_reward},
         {"self_reported_success", r.self_reported_success},
         {"k_max", r.k_max},
         {"total_calls", r.total_calls},
         {"executor_calls", r.executor_calls},
         {"planner_calls", r.planner_calls},
         {"transport_attempts", r.transport_attempts},
         {"call_ceiling", r.call_ceiling},
         {"trials", r.trials},
         {"trace_path", r.trace_path}};
  if (with_wall) j["wall_ms"] = r.wall_ms;
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

double mean(double sum, int n) { return n == 0 ? 0.0 : sum / n; }

}  // namespace

std::string RunRecord::to_jsonl() const { return record_json(*this, true).dump(); }

RunRecord RunRecord::from_jsonl(const std::string& line) {
  try {
    json j = json::parse(line);
    RunRecord r;
    r.task_id = j.at("task_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.d_max = j.value("d_max", 1);
    r.depth = j.value("depth", 0);
    r.split = j.value("split", std::string());
    r.gold_reward = j.at("gold_reward").get<int>();
    r.self_reported_success = j.at("self_reported_success").get<bool>();
    r.k_max = j.value("k_max", 0);
    r.total_calls = j.value("total_calls", 0);
    r.executor_calls = j.value("executor_calls", 0);
    r.planner_calls = j.value("planner_calls", 0);
    r.transport_attempts = j.value("transport_attempts", 0);
    r.call_ceiling = j.value("call_ceiling", 0);
    r.trials = j.value("trials", 1);
    r.wall_ms = j.value("wall_ms", 0.0);
    r.trace_path = j.value("trace_path", std::string());
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad result record: ") + e.what());
  }
}

std::vector<RunRecord> load_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file " + path.string());
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(RunRecord::from_jsonl(line));
  }
  return out;
}

std::vector<textcraft::TaskInstance> resolve_tasks(const RunConfig& cfg,
                                                   const textcraft::RecipeBook& book) {
  std::vector<textcraft::TaskInstance> tasks;
  if (!cfg.tasks.empty()) {
    tasks = textcraft::load_tasks(cfg.tasks);
  } else {
    textcraft::TaskGenOptions opts = cfg.task_gen;
    opts.seed = cfg.seed;
    tasks = textcraft::generate_tasks(book, opts);
  }
  if (cfg.split) {
    std::erase_if(tasks, [&](const auto& t) { return t.split != *cfg.split; });
  }
  if (cfg.limit && tasks.size() > static_cast<size_t>(*cfg.limit)) {
    tasks.resize(static_cast<size_t>(*cfg.limit));
  }
  return tasks;
}

RunRecord run_episode(const RunConfig& cfg, std::shared_ptr<const textcraft::RecipeBook> book,
                      const textcraft::TaskInstance& task, uint64_t ordinal,
                      const PromptLibrary* prompts, EpisodeResult* episode) {
  RunRecord rec;
  rec.task_id = task.id;
  rec.strategy = std::string(to_string(cfg.strategy.strategy));
  rec.d_max = cfg.strategy.controller.d_max;
  rec.depth = task.depth;
  rec.split = std::string(textcraft::to_string(task.split));
  rec.call_ceiling = cfg.strategy.controller.effective_ceiling();

  auto started = std::chrono::steady_clock::now();
  try {
    textcraft::TextCraftEnv env(book, task);
    auto executor = make_backend(cfg.executor_backend, book, ordinal);
    auto planner = make_backend(cfg.planner_backend, book, ordinal);
    CallLedger ledger;
    EpisodeIO io{env, *executor, *planner, ledger, prompts, {}};
    EpisodeResult ep = run_strategy(task.goal, cfg.strategy, io);

    rec.gold_reward = ep.gold_reward;
    rec.self_reported_success = ep.self_reported_success;
    rec.k_max = ep.k_max;
    rec.total_calls = ep.ledger.total_calls();
    rec.executor_calls = ep.ledger.executor_calls();
    rec.planner_calls = ep.ledger.planner_calls();
    rec.transport_attempts = ep.ledger.transport_attempts();
    rec.trials = ep.trials;
    if (cfg.record_tree) {
      fs::path rel = fs::path("traces") / (task.id + ".json");
      fs::create_directories(cfg.out_dir / "traces");
      std::ofstream(cfg.out_dir / rel) << trace_json(ep) << '\n';
      rec.trace_path = rel.string();
    }
    if (episode) *episode = std::move(ep);
  } catch (const std::exception& e) {
    rec.error = e.what();
    spdlog::error("task {} failed: {}", task.id, e.what());
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          started)
                    .count();
  return rec;
}

ExperimentReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  textcraft::LoadReport load;
  auto book = std::make_shared<const textcraft::RecipeBook>(textcraft::load_recipes(
      cfg.recipes.empty() ? textcraft::bundled_minibook_dir() : cfg.recipes, &load));
  if (load.malformed > 0) spdlog::warn("{} malformed recipe records skipped", load.malformed);
  auto tasks = resolve_tasks(cfg, *book);
  std::optional<PromptLibrary> prompts;
  if (!cfg.prompts_dir.empty()) prompts.emplace(cfg.prompts_dir);

  ExperimentReport report;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.out_dir.string());
  report.results_path = cfg.out_dir / "results.jsonl";

  // Resume: keep every parsable line, drop a torn trailing write.
  std::set<std::string> done;
  if (fs::exists(report.results_path)) {
    std::ifstream in(report.results_path);
    std::string line;
    bool torn = false;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        report.records.push_back(RunRecord::from_jsonl(line));
        done.insert(report.records.back().task_id);
      } catch (const ConfigError&) {
        torn = true;
      }
    }
    if (torn) {
      spdlog::warn("dropping unreadable lines from {}", report.results_path.string());
      std::ofstream rewrite(report.results_path, std::ios::trunc);
      for (const auto& r : report.records) rewrite << r.to_jsonl() << '\n';
    }
  }

  std::vector<size_t> pending;
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (done.count(tasks[i].id)) {
      ++report.skipped;
    } else {
      pending.push_back(i);
    }
  }

  std::ofstream out(report.results_path, std::ios::app);
  if (!out) throw ConfigError("cannot write " + report.results_path.string());

  std::mutex mu;
  std::condition_variable ready;
  std::deque<RunRecord> finished;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t n; (n = next++) < pending.size();) {
      size_t i = pending[n];
      RunRecord rec = run_episode(cfg, book, tasks[i], i, prompts ? &*prompts : nullptr);
      {
        std::lock_guard lock(mu);
        finished.push_back(std::move(rec));
      }
      ready.notify_one();
    }
  };
  size_t nworkers = std::min(pending.size(), static_cast<size_t>(cfg.parallelism));
  std::vector<std::thread> pool;
  for (size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);

  // This thread is the only writer of the results file.
  for (size_t written = 0; written < pending.size(); ++written) {
    RunRecord rec;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return !finished.empty(); });
      rec = std::move(finished.front());
      finished.pop_front();
    }
    out << rec.to_jsonl() << '\n' << std::flush;
    spdlog::info("[{}/{}] {} gold={} self={} calls={}", written + 1, pending.size(),
                 rec.task_id, rec.gold_reward, rec.self_reported_success, rec.total_calls);
    report.records.push_back(std::move(rec));
    ++report.executed;
  }
  for (auto& t : pool) t.join();
  return report;
}

MetricsSummary summarize(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyInput("no records to summarize");
  MetricsSummary m;
  m.episodes = static_cast<int>(records.size());
  double gold = 0, self = 0, calls = 0, ecalls = 0, pcalls = 0, kmax = 0;
  struct Acc {
    int n = 0, solved = 0;
    double k = 0, k_solved = 0;
  };
  std::map<int, Acc> depth;
  for (const auto& r : records) {
    gold += r.gold_reward;
    self += r.self_reported_success ? 1 : 0;
    calls += r.total_calls;
    ecalls += r.executor_calls;
    pcalls += r.planner_calls;
    kmax += r.k_max;
    if (r.error) ++m.errors;
    if (r.call_ceiling > 0 && r.total_calls > r.call_ceiling) ++m.budget_violations;
    Acc& a = depth[r.depth];
    ++a.n;
    a.k += r.k_max;
    if (r.gold_reward == 1) {
      ++a.solved;
      a.k_solved += r.k_max;
    }
  }
  const int n = m.episodes;
  m.success_rate = 100.0 * gold / n;
  m.self_reported_rate = 100.0 * self / n;
  m.heuristic_gap = m.self_reported_rate - m.success_rate;
  m.mean_calls = calls / n;
  m.mean_executor_calls = ecalls / n;
  m.mean_planner_calls = pcalls / n;
  m.mean_k_max = kmax / n;
  for (const auto& [d, a] : depth) {
    m.per_depth[d] = DepthSummary{a.n, 100.0 * a.solved / a.n, mean(a.k, a.n),
                                  mean(a.k_solved, a.solved)};
  }
  return m;
}

std::string format_summary(const MetricsSummary& m) {
  char buf[256];
  std::string out;
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  line("episodes           %d\n", m.episodes);
  line("success rate       %.1f%%\n", m.success_rate);
  line("self-reported      %.1f%%\n", m.self_reported_rate);
  line("heuristic gap      %+.1f\n", m.heuristic_gap);
  line("mean LLM calls     %.2f (executor %.2f, planner %.2f)\n", m.mean_calls,
       m.mean_executor_calls, m.mean_planner_calls);
  line("mean k_max         %.2f\n", m.mean_k_max);
  if (m.errors) line("errors             %d\n", m.errors);
  if (m.budget_violations) line("over budget        %d\n", m.budget_violations);
  out += "\ndepth  episodes  success  k_max  k_max(solved)\n";
  for (const auto& [d, s] : m.per_depth) {
    line("%-6d %-9d %-8.1f %-6.2f %.2f\n", d, s.episodes, s.success_rate, s.mean_k_max,
         s.mean_k_max_solved);
  }
  return out;
}

std::string canonicalize(const std::vector<RunRecord>& records) {
  std::vector<const RunRecord*> sorted;
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const RunRecord* a, const RunRecord* b) {
    return std::tie(a->task_id, a->strategy, a->d_max) <
           std::tie(b->task_id, b->strategy, b->d_max);
  });
  std::string out;
  for (const RunRecord* r : sorted) out += record_json(*r, false).dump() + "\n";
  return out;
}

}  // namespace adapt
