#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "csi/relay.hpp"
#include "csi/sentiment.hpp"
#include "csi/sim.hpp"
#include "csi/topology.hpp"

namespace {

void BM_Partition(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(csi::partition(n, 5, 6, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Partition)->Arg(241)->Arg(10000);

std::vector<csi::Message> chatter(std::size_t count) {
  const char* lines[] = {"I think 720 because the jar is tall", "no way, 500", "not 900",
                         "659 since the layers look dense", "agree with 720", "hmm"};
  std::vector<csi::Message> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({i, 0, csi::HumanAuthor{"p" + std::to_string(i % 6)}, lines[i % 6], csi::Millis{1000 * i}});
  return out;
}

void BM_DistillMock(benchmark::State& state) {
  const auto window = chatter(static_cast<std::size_t>(state.range(0)));
  const auto options = csi::sim::default_options();
  for (auto _ : state) benchmark::DoNotOptimize(csi::distill_mock(window, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DistillMock)->Arg(10)->Arg(200);

void BM_ScoreWindow(benchmark::State& state) {
  const auto window = chatter(static_cast<std::size_t>(state.range(0)));
  const auto options = csi::sim::default_options();
  for (auto _ : state) benchmark::DoNotOptimize(csi::score_window(window, options));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreWindow)->Arg(1000);

void BM_FullSimulation(benchmark::State& state) {
  csi::sim::ExperimentSpec spec;
  spec.swarm.options = csi::sim::default_options();
  spec.truth = 659;
  spec.population.count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ++spec.seed;
    benchmark::DoNotOptimize(csi::sim::run_experiment(spec));
  }
}
BENCHMARK(BM_FullSimulation)->Arg(241)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
