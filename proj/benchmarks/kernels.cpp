#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "slowent/covering.hpp"
#include "slowent/models.hpp"
#include "slowent/stacking.hpp"
#include "slowent/transport.hpp"
#include "slowent/window_index.hpp"

using namespace slowent;

namespace {

BinaryWord random_word(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint64_t> blocks((n + 63) / 64);
  for (auto& b : blocks) b = rng();
  return BinaryWord::from_blocks(std::move(blocks), n);
}

NameDistribution random_distribution(std::mt19937_64& rng, unsigned n, std::size_t k) {
  std::vector<BinaryWord> support;
  std::vector<double> probs;
  std::vector<bool> used(std::size_t{1} << n, false);
  double total = 0.0;
  while (support.size() < k) {
    const auto v = rng() & ((std::uint64_t{1} << n) - 1);
    if (used[v]) continue;
    used[v] = true;
    support.push_back(BinaryWord::from_uint(v, n));
    probs.push_back(1.0 + static_cast<double>(rng() % 100));
    total += probs.back();
  }
  for (auto& p : probs) p /= total;
  return NameDistribution(std::move(support), std::move(probs));
}

}  // namespace

static void BM_dbar_words(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_word(rng, n), b = random_word(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(dbar_words(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * n / 4));
}
BENCHMARK(BM_dbar_words)->Arg(64)->Arg(400)->Arg(4096);

// The inner loop of the VWB tester: dense future distributions on {0,1}^N.
static void BM_hypercube_transport(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<unsigned>(state.range(0));
  std::vector<std::vector<double>> instances(64, std::vector<double>(std::size_t{1} << n));
  for (auto& e : instances) {
    const auto p = random_distribution(rng, n, e.size() / 2), q = random_distribution(rng, n, e.size() / 2);
    for (std::size_t i = 0; i < p.size(); ++i) e[p.support()[i].window(0, n)] += p.probs()[i];
    for (std::size_t i = 0; i < q.size(); ++i) e[q.support()[i].window(0, n)] -= q.probs()[i];
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(hypercube_transport(instances[i++ % instances.size()], n));
}
BENCHMARK(BM_hypercube_transport)->Arg(4)->Arg(6)->Arg(8);

static void BM_dbar_dist_bipartite(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = random_distribution(rng, 12, k), q = random_distribution(rng, 12, k);
  for (auto _ : state) benchmark::DoNotOptimize(dbar_dist_bipartite(p, q));
}
BENCHMARK(BM_dbar_dist_bipartite)->Arg(8)->Arg(32)->Arg(128);

static void BM_dbar_dist_greedy(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = random_distribution(rng, 12, k), q = random_distribution(rng, 12, k);
  for (auto _ : state) benchmark::DoNotOptimize(dbar_dist_greedy(p, q));
}
BENCHMARK(BM_dbar_dist_greedy)->Arg(32)->Arg(128);

static void BM_count_windows(benchmark::State& state) {
  const auto orbit = sample_orbit(ProcessGenerator::sturmian(RotationNumber::golden(), 0.0), 1'000'000, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_distinct_windows(orbit.symbols, n));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * orbit.symbols.size()));
}
BENCHMARK(BM_count_windows)->Arg(16)->Arg(64)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_greedy_cover(benchmark::State& state) {
  const auto orbit = sample_orbit(ProcessGenerator::sturmian(RotationNumber::golden(), 0.0), 1'000'000, 1);
  std::mt19937_64 rng(5);
  std::vector<BinaryWord> words;
  for (int i = 0; i < state.range(0); ++i) words.push_back(orbit.symbols.slice(rng() % 999'000, 400));
  const auto sample = WeightedSample::uniform(std::move(words));
  CoverParams p;
  p.n = 400;
  for (auto _ : state) benchmark::DoNotOptimize(greedy_cover(sample, p).k);
}
BENCHMARK(BM_greedy_cover)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_stacked_name(benchmark::State& state) {
  const auto tower = build_tower(1'000'000, 400);
  const auto sn = independent_stack_names(tower, 10, 7);
  std::uint64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sn.name_at(t % 1'000'000, t, 400));
    t += 7919;
  }
}
BENCHMARK(BM_stacked_name);
BENCHMARK_MAIN();
