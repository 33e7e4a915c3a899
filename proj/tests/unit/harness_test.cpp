#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "adapt/cli.hpp"
#include "adapt/errors.hpp"
#include "adapt/harness.hpp"
#include "test_support.hpp"

namespace adapt {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("adapt_harness_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path path;
};

RunRecord record(const std::string& id, int gold, bool self, int depth = 2) {
  RunRecord r;
  r.task_id = id;
  r.strategy = "adapt";
  r.d_max = 3;
  r.depth = depth;
  r.gold_reward = gold;
  r.self_reported_success = self;
  r.total_calls = 4;
  r.executor_calls = 3;
  r.planner_calls = 1;
  r.call_ceiling = 63;
  r.k_max = depth;
  return r;
}

RunConfig scripted_run(const fs::path& out, int d_max = 3) {
  RunConfig cfg;
  cfg.out_dir = out;
  cfg.strategy.controller.d_max = d_max;
  return cfg;
}

TEST(Summarize, AllSolved) {
  std::vector<RunRecord> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(record("t" + std::to_string(i), 1, true));
  MetricsSummary m = summarize(rs);
  EXPECT_EQ(m.episodes, 5);
  EXPECT_DOUBLE_EQ(m.success_rate, 100.0);
  EXPECT_DOUBLE_EQ(m.heuristic_gap, 0.0);
  EXPECT_DOUBLE_EQ(m.mean_calls, 4.0);
}

TEST(Summarize, HalfSolved) {
  std::vector<RunRecord> rs{record("a", 1, true), record("b", 0, false), record("c", 0, false),
                            record("d", 1, true)};
  EXPECT_DOUBLE_EQ(summarize(rs).success_rate, 50.0);
}

TEST(Summarize, HeuristicGap) {
  std::vector<RunRecord> rs;
  for (int i = 0; i < 10; ++i) {
    rs.push_back(record("t" + std::to_string(i), i < 5 ? 1 : 0, i < 8));
  }
  MetricsSummary m = summarize(rs);
  EXPECT_NEAR(m.heuristic_gap, 30.0, 1e-9);
  EXPECT_NEAR(m.self_reported_rate, 80.0, 1e-9);
}

TEST(Summarize, PerDepthAndViolations) {
  std::vector<RunRecord> rs{record("a", 1, true, 2), record("b", 0, false, 3),
                            record("c", 1, true, 3)};
  rs[1].total_calls = 64;
  MetricsSummary m = summarize(rs);
  EXPECT_EQ(m.budget_violations, 1);
  EXPECT_EQ(m.per_depth.at(3).episodes, 2);
  EXPECT_DOUBLE_EQ(m.per_depth.at(3).success_rate, 50.0);
  EXPECT_DOUBLE_EQ(m.per_depth.at(3).mean_k_max_solved, 3.0);
}

TEST(Summarize, EmptyThrows) { EXPECT_THROW(summarize({}), EmptyInput); }

TEST(RunRecord, JsonRoundTrip) {
  RunRecord r = record("beehive", 1, true);
  r.error = "boom";
  r.wall_ms = 12.5;
  RunRecord back = RunRecord::from_jsonl(r.to_jsonl());
  EXPECT_EQ(back.task_id, "beehive");
  EXPECT_EQ(back.error, r.error);
  EXPECT_EQ(back.call_ceiling, 63);
  EXPECT_THROW(RunRecord::from_jsonl("{not json"), ConfigError);
}

TEST(Experiment, ResumesWhereItStopped) {
  TempDir dir;
  RunConfig cfg = scripted_run(dir.path);
  cfg.limit = 6;
  ExperimentReport first = run_experiment(cfg);
  EXPECT_EQ(first.executed, 6);
  cfg.limit = 10;
  ExperimentReport second = run_experiment(cfg);
  EXPECT_EQ(second.skipped, 6);
  EXPECT_EQ(second.executed, 4);
  EXPECT_EQ(load_records(second.results_path).size(), 10u);
}

TEST(Experiment, TornLastLineIsRerun) {
  TempDir dir;
  RunConfig cfg = scripted_run(dir.path);
  cfg.limit = 3;
  ExperimentReport first = run_experiment(cfg);
  {
    std::ofstream out(first.results_path, std::ios::app);
    out << "{\"task_id\": \"half";
  }
  cfg.limit = 4;
  ExperimentReport second = run_experiment(cfg);
  EXPECT_EQ(second.executed, 1);
  EXPECT_EQ(load_records(second.results_path).size(), 4u);
}

TEST(Experiment, ParallelMatchesSequential) {
  TempDir a, b;
  RunConfig seq = scripted_run(a.path);
  RunConfig par = scripted_run(b.path);
  par.parallelism = 4;
  auto r1 = run_experiment(seq);
  auto r2 = run_experiment(par);
  EXPECT_EQ(canonicalize(r1.records), canonicalize(r2.records));
  EXPECT_GE(r1.records.size(), 20u);
}

TEST(Experiment, TracesWhenRequested) {
  TempDir dir;
  RunConfig cfg = scripted_run(dir.path);
  cfg.limit = 2;
  cfg.record_tree = true;
  auto rep = run_experiment(cfg);
  for (const auto& r : rep.records) {
    EXPECT_TRUE(fs::exists(dir.path / r.trace_path)) << r.trace_path;  // relative to out
  }
}

TEST(Experiment, SplitFilter) {
  RunConfig cfg;
  cfg.split = textcraft::Split::kTest;
  for (const auto& t : resolve_tasks(cfg, *testing::minibook())) {
    EXPECT_EQ(t.split, textcraft::Split::kTest);
  }
}

TEST(Config, LoadsIni) {
  TempDir dir;
  fs::path ini = dir.path / "run.ini";
  std::ofstream(ini) << "[run]\nout = res\nparallelism = 2\nlimit = 5\n"
                        "[strategy]\nname = try_again\nd_max = 4\nretry_temperature = 0.5\n"
                        "[executor_backend]\nkind = scripted\ncompetence = 2\n"
                        "[planner_backend]\nkind = http_chat\nmodel = m\n"
                        "endpoint = http://localhost:1/v1/chat/completions\nstop = a|\\nObservation\n";
  RunConfig cfg = load_run_config(ini);
  EXPECT_EQ(cfg.out_dir, dir.path / "res");
  EXPECT_EQ(cfg.parallelism, 2);
  EXPECT_EQ(cfg.limit, 5);
  EXPECT_EQ(cfg.strategy.strategy, Strategy::kTryAgain);
  EXPECT_EQ(cfg.strategy.controller.d_max, 4);
  EXPECT_DOUBLE_EQ(cfg.strategy.retry_temperature, 0.5);
  EXPECT_EQ(cfg.executor_backend.scripted.competence, 2);
  EXPECT_EQ(cfg.planner_backend.kind, BackendKind::kHttpChat);
  EXPECT_EQ(cfg.planner_backend.stop_sequences, (std::vector<std::string>{"a", "\nObservation"}));
}

TEST(Config, RejectsBadValues) {
  TempDir dir;
  fs::path ini = dir.path / "bad.ini";
  std::ofstream(ini) << "[strategy]\nd_max = lots\n";
  EXPECT_THROW(load_run_config(ini), ConfigError);
  RunConfig cfg;
  EXPECT_THROW(apply_setting(cfg, "strategy", "colour", "red"), ConfigError);
  apply_setting(cfg, "strategy", "d_max", "0");
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(load_run_config(dir.path / "missing.ini"), ConfigError);
}

TEST(Config, BackendSpec) {
  BackendConfig b = parse_backend_spec("scripted,competence=3,misdeclare_rate=0.2");
  EXPECT_EQ(b.kind, BackendKind::kScripted);
  EXPECT_EQ(b.scripted.competence, 3);
  EXPECT_DOUBLE_EQ(b.scripted.misdeclare_rate, 0.2);
  EXPECT_THROW(parse_backend_spec("telepathy"), ConfigError);
}

TEST(Cli, InvalidConfigExitsTwo) {
  TempDir dir;
  fs::path ini = dir.path / "bad.ini";
  std::ofstream(ini) << "[strategy]\nname = guess\n";
  EXPECT_EQ(cli_main({"adapt", "-q", "run", "--config", ini.string()}), 2);
  EXPECT_EQ(cli_main({"adapt", "-q", "run", "--no-such-flag"}), 2);
}

TEST(Cli, SweepWritesOneRowPerDepth) {
  TempDir dir;
  EXPECT_EQ(cli_main({"adapt", "-q", "sweep-depth", "--max", "4", "--limit", "5", "--out",
                      dir.path.string()}),
            0);
  std::ifstream in(dir.path / "sweep.csv");
  std::string line;
  int rows = -1;  // header
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  for (int d = 1; d <= 4; ++d) {
    EXPECT_TRUE(fs::exists(dir.path / ("d" + std::to_string(d)) / "results.jsonl"));
  }
}

TEST(Cli, SummarizeAndOracle) {
  TempDir dir;
  ASSERT_EQ(cli_main({"adapt", "-q", "run", "--limit", "3", "--out", dir.path.string()}), 0);
  EXPECT_EQ(cli_main({"adapt", "-q", "summarize", dir.path.string()}), 0);
  EXPECT_EQ(cli_main({"adapt", "-q", "summarize", (dir.path / "nothing").string()}), 2);
  EXPECT_EQ(cli_main({"adapt", "-q", "oracle", "--target", "beehive"}), 0);
}

}  // namespace
}  // namespace adapt
