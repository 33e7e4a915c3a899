#include <benchmark/benchmark.h>

#include "adapt/textcraft.hpp"

namespace {

using namespace adapt::textcraft;

const RecipeBook& book() {
  static const RecipeBook b = load_recipes(bundled_minibook_dir());
  return b;
}

void BM_LoadMinibook(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(load_recipes(bundled_minibook_dir()));
}
BENCHMARK(BM_LoadMinibook);

void BM_OracleLantern(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(oracle_solve("lantern", book()));
}
BENCHMARK(BM_OracleLantern);

void BM_ReplayOracle(benchmark::State& state) {
  TaskInstance task = build_task("dispenser", book(), 7);
  auto actions = oracle_solve(task, book());
  for (auto _ : state) {
    GameState s = reset_game(task);
    for (const auto& a : actions) benchmark::DoNotOptimize(step_game(book(), s, a));
  }
}
BENCHMARK(BM_ReplayOracle);

void BM_GenerateTasks(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(generate_tasks(book(), {1, 4, 3, 77, 10}));
}
BENCHMARK(BM_GenerateTasks);

}  // namespace
