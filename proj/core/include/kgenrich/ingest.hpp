#pragma once
// Loading, sanitization, splitting and metadata for knowledge graphs.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgenrich/kg.hpp"
#include "kgenrich/query_log.hpp"

namespace kgenrich {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  // Abort with ParseError on the first malformed line instead of skipping it.
  bool strict = false;
};

struct LoadReport {
  std::uint64_t lines = 0;
  std::uint64_t triplets = 0;    // distinct triplets stored
  std::uint64_t duplicates = 0;
  std::uint64_t literals = 0;    // N-Triples lines with a literal object
  std::uint64_t malformed = 0;
  std::vector<std::string> malformed_samples;  // first few offending lines, "line N: ..."
};

// Triplets as loaded, over a vocabulary that is still open.
struct RawGraph {
  Vocabulary entities;
  Vocabulary predicates;
  std::vector<Triplet> triplets;
  LoadReport report;
};

RawGraph load_ntriples(std::istream& in, const LoadOptions& options = {});
RawGraph load_ntriples(const std::filesystem::path& path, const LoadOptions& options = {});
RawGraph load_tsv(std::istream& in, const LoadOptions& options = {});
RawGraph load_tsv(const std::filesystem::path& path, const LoadOptions& options = {});
// Dispatches on extension: ".nt" is N-Triples, anything else TSV.
RawGraph load_graph(const std::filesystem::path& path, const LoadOptions& options = {});

RawGraph to_raw(const KnowledgeGraph& kg);

// Labels mentioned by mined query pairs.
struct QueryTerms {
  std::set<std::string> entities;
  std::set<std::string> predicates;

  static QueryTerms from(const MinedPairs& mined);
};

struct SanitizeRules {
  bool drop_url_or_number = true;
  bool drop_lists = true;
  std::string list_prefix = "List_of";  // matched case-insensitively on the local name
  bool require_query_relevance = true;
};

struct SanitizationReport {
  std::uint64_t input = 0;
  std::uint64_t kept = 0;
  std::uint64_t removed_url_number = 0;
  std::uint64_t removed_list = 0;
  std::uint64_t removed_query_irrelevant = 0;
};

struct SanitizeResult {
  KnowledgeGraph kg;  // every triplet in Split::Train until split() runs
  SanitizationReport report;
};

// Part of a label after the last '/' or '#'.
std::string_view local_name(std::string_view label);
bool is_url_or_number_entity(std::string_view label);
bool is_list_entity(std::string_view label, std::string_view list_prefix = "List_of");

// Removes URL-only, number-only and list entities, then every triplet for
// which neither the predicate nor either entity occurs among `terms`. The
// resulting KG has fresh dense vocabularies holding only referenced labels.
SanitizeResult sanitize(const RawGraph& raw, const QueryTerms& terms,
                        const SanitizeRules& rules = {});

struct SplitRatios {
  double train = 0.70;
  double dev = 0.10;
  double test = 0.20;
};

// Uniform random partition of the triplets. The assignment depends only on
// the triplet set (by label) and the seed, not on load order.
KnowledgeGraph split(const KnowledgeGraph& kg, const SplitRatios& ratios, std::uint64_t seed);

struct MetadataTable {
  std::map<VocabId, std::set<std::string>> entity_types;
  std::map<VocabId, std::set<std::string>> predicate_domains;
  std::map<VocabId, std::set<std::string>> predicate_ranges;
  std::vector<std::string> warnings;
};

// entity_type file: `entity<TAB>type[<TAB>type...]`, one or more rows per
// entity. domain_range file: `predicate<TAB>domain<TAB>range`, where each
// field may hold a comma-separated list and an empty field means no
// constraint. Labels missing from the KG are skipped with a warning.
MetadataTable load_metadata(const std::filesystem::path& entity_type_path,
                            const std::filesystem::path& domain_range_path,
                            const KnowledgeGraph& kg);

std::string format_load_report(const LoadReport& report);
std::string format_sanitization_report(const SanitizationReport& report);

// On-disk layout of a processed KG: entities.txt, predicates.txt and one
// label TSV per split.
void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir);
KnowledgeGraph load_kg(const std::filesystem::path& dir);

}  // namespace kgenrich
