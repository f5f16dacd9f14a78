#include <benchmark/benchmark.h>

#include <random>

#include "kgenrich/predictor.hpp"

using namespace kgenrich;

namespace {

KnowledgeGraph random_kg(std::size_t entities, std::size_t predicates, std::size_t triplets) {
  Vocabulary ev, pv;
  for (std::size_t i = 0; i < entities; ++i) ev.intern("e" + std::to_string(i));
  for (std::size_t i = 0; i < predicates; ++i) pv.intern("p" + std::to_string(i));
  KnowledgeGraph kg(std::move(ev), std::move(pv));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<VocabId> e(0, static_cast<VocabId>(entities - 1)),
      r(0, static_cast<VocabId>(predicates - 1));
  while (kg.size() < triplets) kg.add({e(rng), r(rng), e(rng)});
  return kg;
}

}  // namespace

static void BM_RsProposals(benchmark::State& state) {
  const auto kg = random_kg(500, 10, 5000);
  const auto model = RotatEModel::initialized(500, 10, 16, 4.0, Norm::L1, 1);
  const auto marginal = PredicateMarginal::from_train(kg);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto s = sample_rs_accepted(model, marginal, 100, ++seed);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_RsProposals)->Unit(benchmark::kMillisecond);

static void BM_PredictQg(benchmark::State& state) {
  const auto kg = random_kg(500, 10, 5000);
  const auto model = RotatEModel::initialized(500, 10, 16, 4.0, Norm::L1, 1);
  QueryPairTable pairs;
  for (VocabId i = 0; i < 200; ++i) pairs.add({i, i % 10, Orientation::SubjectKnown});
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto run = predict_qg(model, kg, pairs, 500, ++seed);
    benchmark::DoNotOptimize(run);
  }
}
BENCHMARK(BM_PredictQg)->Unit(benchmark::kMillisecond);
