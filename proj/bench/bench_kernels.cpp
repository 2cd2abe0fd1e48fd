// Serial reference vs OpenMP kernels: batched simulator windows, minibatch
// TD gradient and a small suite of independent training runs.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "coex/agents.hpp"
#include "coex/config.hpp"
#include "coex/qnetwork.hpp"
#include "coex/rng.hpp"
#include "coex/simulator.hpp"
#include "coex/suite.hpp"

using namespace coex;

namespace {

SimConfig bench_sim() {
  ExperimentConfig cfg;
  return sim_config(cfg, 5, 3);
}

std::vector<std::uint64_t> seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = stream_seed(7, i);
  return s;
}

void BM_RunWindowsSerial(benchmark::State& state) {
  const SimConfig sim = bench_sim();
  const auto sd = seeds(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::run_windows(sim, 4000.0, sd));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunWindowsOmp(benchmark::State& state) {
  const SimConfig sim = bench_sim();
  const auto sd = seeds(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(omp::run_windows(sim, 4000.0, sd));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

struct GradFixture {
  QNetwork net = QNetwork::initialized({1, 64, 64, 3}, 11);
  std::vector<double> states, targets, grad;
  std::vector<int> actions;

  explicit GradFixture(std::size_t n) : grad(net.parameter_count()) {
    Rng rng(3);
    for (std::size_t i = 0; i < n; ++i) {
      states.push_back(2.0 * uniform_unit(rng) - 1.0);
      actions.push_back(static_cast<int>(uniform_below(rng, 3)));
      targets.push_back(4.0 * uniform_unit(rng) - 1.0);
    }
  }
  TdBatch batch() const { return {states, actions, targets}; }
};

void BM_TdGradientSerial(benchmark::State& state) {
  GradFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(serial::td_loss_gradient(f.net, f.batch(), f.grad));
}

void BM_TdGradientOmp(benchmark::State& state) {
  GradFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(omp::td_loss_gradient(f.net, f.batch(), f.grad));
}

ExperimentConfig small_suite() {
  ExperimentConfig cfg;
  cfg.agent.episodes = 4;
  cfg.agent.steps_per_episode = 20;
  cfg.report.last_episodes = 4;
  cfg.window_slots = 5000;
  cfg.trials = 2;
  cfg.sweep.n_pairs = {2, 5};
  cfg.sweep.schemes = {Scheme::LBT, Scheme::Q1};
  return cfg;
}

void BM_SuiteSerial(benchmark::State& state) {
  const ExperimentConfig cfg = small_suite();
  for (auto _ : state) benchmark::DoNotOptimize(serial::run_suite(cfg));
}

void BM_SuiteOmp(benchmark::State& state) {
  const ExperimentConfig cfg = small_suite();
  for (auto _ : state) benchmark::DoNotOptimize(omp::run_suite(cfg));
}

}  // namespace

BENCHMARK(BM_RunWindowsSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunWindowsOmp)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TdGradientSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TdGradientOmp)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SuiteSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SuiteOmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
