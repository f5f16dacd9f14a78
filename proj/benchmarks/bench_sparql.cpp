#include <benchmark/benchmark.h>

#include <string>

#include "kgenrich/sparql.hpp"

using namespace kgenrich;

static void BM_ParseSelect(benchmark::State& state) {
  const std::string q =
      "PREFIX res: <http://synth.example/resource/> PREFIX ont: <http://synth.example/ontology/> "
      "SELECT ?a ?b WHERE { res:Person_007 ont:rel03 ?a ; ont:rel01 ?b . "
      "OPTIONAL { ?a ont:rel05 res:Place_011 } }";
  for (auto _ : state) {
    auto pairs = extract_pairs(parse_query(q));
    benchmark::DoNotOptimize(pairs);
  }
}
BENCHMARK(BM_ParseSelect);

static void BM_PercentDecode(benchmark::State& state) {
  const std::string q =
      "SELECT%20%3Fs%20WHERE%20%7B%20%3Fs%20%3Chttp%3A%2F%2Fx%2Fp%3E%20%3Chttp%3A%2F%2Fx%2FA%3E%20%7D";
  for (auto _ : state) {
    auto d = percent_decode(q);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_PercentDecode);
