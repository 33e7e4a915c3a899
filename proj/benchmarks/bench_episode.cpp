#include <benchmark/benchmark.h>

#include "adapt/baselines.hpp"
#include "adapt/textcraft.hpp"

namespace {

using namespace adapt;

void run_target(benchmark::State& state, const char* target, Strategy strategy) {
  auto book = std::make_shared<const textcraft::RecipeBook>(
      textcraft::load_recipes(textcraft::bundled_minibook_dir()));
  auto task = textcraft::build_task(target, *book, 0);
  BackendConfig bc;
  StrategyConfig cfg;
  cfg.strategy = strategy;
  cfg.controller.d_max = 4;
  for (auto _ : state) {
    textcraft::TextCraftEnv env(book, task);
    auto executor = make_backend(bc, book);
    auto planner = make_backend(bc, book);
    CallLedger ledger;
    EpisodeIO io{env, *executor, *planner, ledger, nullptr, {}};
    benchmark::DoNotOptimize(run_strategy(task.goal, cfg, io));
  }
}

void BM_AdaptBeehive(benchmark::State& s) { run_target(s, "beehive", Strategy::kAdapt); }
void BM_AdaptLantern(benchmark::State& s) { run_target(s, "lantern", Strategy::kAdapt); }
void BM_PlanAndExecuteLantern(benchmark::State& s) {
  run_target(s, "lantern", Strategy::kPlanAndExecute);
}
BENCHMARK(BM_AdaptBeehive);
BENCHMARK(BM_AdaptLantern);
BENCHMARK(BM_PlanAndExecuteLantern);

}  // namespace
