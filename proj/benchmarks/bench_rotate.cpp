#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kgenrich/rotate.hpp"

using namespace kgenrich;

static void BM_Score(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto model = RotatEModel::initialized(1000, 10, dim, 6.0, Norm::L1, 1);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<VocabId> e(0, 999), r(0, 9);
  std::vector<Triplet> triplets(4096);
  for (auto& t : triplets) t = {e(rng), r(rng), e(rng)};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.score(triplets[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Score)->Arg(16)->Arg(64)->Arg(200);

static void BM_Gradients(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto model = RotatEModel::initialized(1000, 10, dim, 6.0, Norm::L1, 1);
  TrainConfig cfg;
  cfg.dim = dim;
  cfg.gamma = 6.0;
  cfg.negatives = 8;
  std::vector<Triplet> negatives;
  for (VocabId j = 0; j < 8; ++j) negatives.push_back({10 + j, 3, 20 + j});
  for (auto _ : state) {
    auto g = gradients(model, {1, 3, 2}, negatives, cfg);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_Gradients)->Arg(16)->Arg(64)->Arg(200);
