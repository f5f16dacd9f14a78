#pragma once
// A small generated world for tests, benchmarks and the bundled fixture.
//
// Entities belong to typed groups, each cut into blocks. Every predicate has a
// domain and a range type; a participating head links to tails drawn from one
// block of the range type chosen per (predicate, head block). Some entities
// lose their type in the metadata, and a few junk entities exercise
// sanitization.
//
// Query logs are generated separately, once a split exists: most queries ask
// about pairs held out in the test split, the rest about random pairs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kgenrich/kg.hpp"

namespace kgenrich {

struct SyntheticConfig {
  std::size_t types = 5;
  std::size_t entities_per_type = 100;
  std::size_t blocks_per_type = 10;
  std::size_t predicates = 10;
  double participation = 0.9;  // share of domain entities using a predicate
  std::size_t max_tails = 10;  // tails per participating head, 1..max
  double untyped_fraction = 0.1;
  std::uint64_t seed = 1;
};

struct SyntheticWorld {
  std::vector<std::string> ntriples;       // one N-Triples line each
  std::vector<std::string> entity_types;   // entity<TAB>type
  std::vector<std::string> domain_ranges;  // predicate<TAB>domain<TAB>range
  std::size_t fact_count = 0;
};

SyntheticWorld generate_synthetic(const SyntheticConfig& config);

// kg.nt, entity_types.tsv, domain_range.tsv
void write_synthetic(const SyntheticWorld& world, const std::filesystem::path& dir);

struct QueryLogConfig {
  std::size_t queries = 3000;
  double noise_fraction = 0.2;        // SELECTs over uniformly random pairs
  double other_form_fraction = 0.05;  // ASK and DESCRIBE
  double encoded_fraction = 0.5;      // percent-encoded lines
  std::uint64_t seed = 1;
};

// SELECT queries over test-split pairs of `kg` (either orientation) mixed
// with noise pairs and other query forms.
std::vector<std::string> synthesize_query_log(const KnowledgeGraph& kg,
                                              const QueryLogConfig& config);

}  // namespace kgenrich
