// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "reflex/awareness.hpp"
#include "reflex/strategic.hpp"

using namespace reflex;

namespace {

// p-beauty with n players on 0..hi.
void BM_PureNash(benchmark::State& state) {
  const Game g = p_beauty(static_cast<int>(state.range(0)), 0, static_cast<int>(state.range(1)), 2.0 / 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(pure_nash(g));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.num_profiles()));
}

void BM_PureNashSerial(benchmark::State& state) {
  const Game g = p_beauty(static_cast<int>(state.range(0)), 0, static_cast<int>(state.range(1)), 2.0 / 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(pure_nash_serial(g));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.num_profiles()));
}

// Chain of distinct phantom layers over a two-theta game; complexity grows with `depth`.
struct InfoCase {
  BeliefGraph graph;
  Game game;
};

InfoCase info_case(int depth, int actions) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pay(-4, 4);
  std::vector<std::string> labels;
  for (int a = 0; a < actions; ++a) labels.push_back("a" + std::to_string(a));
  Game::Tensor ta, tb;
  for (int p = 0; p < actions * actions * 2; ++p) {
    ta.push_back(pay(rng));
    tb.push_back(pay(rng));
  }
  InfoCase c{BeliefGraph{2, {"a", "b"}, {}, {}}, Game({labels, labels}, ta, {{"a", ta}, {"b", tb}})};
  // Node 2k owned by player 0, 2k+1 by player 1; layer k believes in layer k+1, the last layer is common knowledge.
  for (int k = 0; k < depth; ++k) {
    const int next = k + 1 < depth ? 2 * (k + 1) : 2 * k;
    c.graph.nodes.push_back({0, k % 2 ? "b" : "a", {2 * k, next + 1}, false});
    c.graph.nodes.push_back({1, k % 3 ? "a" : "b", {next, 2 * k + 1}, false});
  }
  c.graph.roots = {0, 1};
  return c;
}

void BM_InfoEq(benchmark::State& state) {
  const auto c = info_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(informational_equilibrium(c.graph, c.game));
}

void BM_InfoEqSerial(benchmark::State& state) {
  const auto c = info_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(informational_equilibrium_serial(c.graph, c.game));
}

struct FitCase {
  Game game;
  std::vector<std::vector<std::int64_t>> counts;
  FitFamily family;
  FitGrids grids;
};

FitCase fit_case(int points) {
  FitCase c{p_beauty(2, 0, 20, 2.0 / 3.0), {}, {}, {}};
  c.family.max_rank = 4;
  for (const auto& s : predict(c.game, c.family, {1.5, 2.0, 1.0, 0.0})) {
    c.counts.emplace_back();
    for (double p : s.probs()) c.counts.back().push_back(std::llround(1e4 * p));
  }
  c.grids.tau.clear();
  c.grids.lambda.clear();
  for (int i = 1; i <= points; ++i) {
    c.grids.tau.push_back(0.25 * i);
    c.grids.lambda.push_back(0.5 * i);
  }
  return c;
}

void BM_FitGrid(benchmark::State& state) {
  const auto c = fit_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_grid(c.game, c.counts, c.family, c.grids));
}

void BM_FitGridSerial(benchmark::State& state) {
  const auto c = fit_case(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_grid_serial(c.game, c.counts, c.family, c.grids));
}

}  // namespace

BENCHMARK(BM_PureNash)->Args({3, 30})->Args({4, 20})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PureNashSerial)->Args({3, 30})->Args({4, 20})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_InfoEq)->Args({3, 6})->Args({4, 5})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_InfoEqSerial)->Args({3, 6})->Args({4, 5})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitGrid)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FitGridSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
