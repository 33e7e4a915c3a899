#include <benchmark/benchmark.h>

#include "adapt/plan_logic.hpp"

namespace {

void BM_ParseMixedOrder(benchmark::State& state) {
  const std::string text =
      "(Step 1 OR Step 2 OR Step 3) AND Step 4 AND (Step 5 OR (Step 6 AND Step 7))";
  for (auto _ : state) benchmark::DoNotOptimize(adapt::parse_logic(text));
}
BENCHMARK(BM_ParseMixedOrder);

void BM_FormatRoundTrip(benchmark::State& state) {
  auto expr = adapt::parse_logic("Step 1 OR Step 2 OR Step 3 AND Step 4 AND Step 5");
  for (auto _ : state) {
    benchmark::DoNotOptimize(adapt::parse_logic(adapt::format_logic(expr)));
  }
}
BENCHMARK(BM_FormatRoundTrip);

void BM_LayerSplitAndEvaluate(benchmark::State& state) {
  auto expr = adapt::parse_logic("(Step 1 AND Step 2) OR (Step 3 AND Step 4) OR Step 5");
  for (auto _ : state) {
    auto layers = adapt::layer_split(expr);
    benchmark::DoNotOptimize(
        adapt::evaluate_layers_lazy(layers, [](int id) { return id % 2 == 0; }));
  }
}
BENCHMARK(BM_LayerSplitAndEvaluate);

}  // namespace
