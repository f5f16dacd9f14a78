#pragma once
// Query-log mining: one query per line, optionally percent-encoded. SELECT
// queries contribute oriented entity-predicate pairs; the pairs are
// aggregated with frequencies and then resolved against a KG.

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgenrich/kg.hpp"
#include "kgenrich/sparql.hpp"

namespace kgenrich {

struct LogStatistics {
  std::uint64_t total_queries = 0;
  std::array<std::uint64_t, kNumQueryForms> per_form{};
  std::uint64_t unextractable = 0;       // SELECT queries whose body failed to parse
  std::uint64_t pair_occurrences = 0;    // extracted pairs before aggregation
  std::uint64_t dropped_pairs = 0;       // distinct pairs not resolvable in the KG
  std::uint64_t dropped_occurrences = 0;

  std::uint64_t count(QueryForm f) const { return per_form[static_cast<std::size_t>(f)]; }
  double select_fraction() const;
};

// Label-level aggregation of a log.
struct MinedPairs {
  std::map<QueryPair, std::uint64_t> frequencies;
  LogStatistics stats;

  std::set<std::string> entity_labels() const;
  std::set<std::string> predicate_labels() const;
};

MinedPairs mine_log(std::istream& in, bool decode = true);
MinedPairs mine_log(const std::filesystem::path& path, bool decode = true);

class QueryPairTable {
 public:
  struct Entry {
    EntityPredicatePair pair;
    std::uint64_t frequency = 0;
  };

  // Adds `frequency` to the pair's count. Frequency must be positive.
  void add(const EntityPredicatePair& pair, std::uint64_t frequency = 1);

  // All entries sorted by pair.
  std::vector<Entry> entries() const;
  std::vector<Entry> entries(Orientation o) const;
  std::uint64_t frequency(const EntityPredicatePair& pair) const;
  bool contains(const EntityPredicatePair& pair) const { return counts_.count(pair) != 0; }
  std::size_t size() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  std::size_t size(Orientation o) const;
  std::uint64_t total_frequency(Orientation o) const;

 private:
  std::map<EntityPredicatePair, std::uint64_t> counts_;
};

// Keeps the mined pairs whose entity and predicate both exist in `kg`;
// the rest are counted into `stats`.
QueryPairTable resolve_pairs(const MinedPairs& mined, const KnowledgeGraph& kg,
                             LogStatistics& stats);

struct PairTableBuild {
  QueryPairTable table;
  LogStatistics stats;
};

PairTableBuild build_pair_table(const std::filesystem::path& log_path, const KnowledgeGraph& kg,
                                bool decode = true);

// TSV: entity, predicate, orientation, frequency.
void write_pair_table(const QueryPairTable& table, const KnowledgeGraph& kg,
                      const std::filesystem::path& path);
QueryPairTable read_pair_table(const std::filesystem::path& path, const KnowledgeGraph& kg);

std::string format_log_statistics(const LogStatistics& stats);

}  // namespace kgenrich
