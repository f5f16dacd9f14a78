#pragma once
// Post-hoc guidance over predicted entity-predicate pairs.
//
// KM splits pairs by whether the entity's types meet the predicate's domain
// (subject known) or range (object known). ES ranks pairs by their best
// predicted score and cuts the ranking into equal-count bins.

#include <filesystem>
#include <string>
#include <vector>

#include "kgenrich/ingest.hpp"
#include "kgenrich/kg.hpp"
#include "kgenrich/predictor.hpp"

namespace kgenrich {

enum class KmReason {
  DomainMatch,
  DomainMismatch,
  MissingEntityType,
  MissingPredicateConstraint,
  MissingBoth,  // neither side has metadata
};

const char* to_string(KmReason reason);
KmReason parse_km_reason(std::string_view text);

struct KmVerdict {
  EntityPredicatePair pair;
  bool compatible = false;  // true only with DomainMatch
  KmReason reason = KmReason::MissingBoth;
};

// No subclass reasoning: a type must appear literally in the constraint set.
// Throws std::out_of_range for ids outside `kg`.
KmVerdict km_classify(const EntityPredicatePair& pair, const MetadataTable& metadata,
                      const KnowledgeGraph& kg);

// Distinct pairs of the given orientation, in first-seen order.
std::vector<EntityPredicatePair> prediction_pairs(const std::vector<Prediction>& predictions,
                                                  Orientation orientation);

std::vector<KmVerdict> km_partition(const std::vector<EntityPredicatePair>& pairs,
                                    const MetadataTable& metadata, const KnowledgeGraph& kg);

inline constexpr std::size_t kEsBins = 50;

struct EsEntry {
  EntityPredicatePair pair;
  double max_score = 0.0;
  std::size_t bin = 0;
};

struct EsBinning {
  std::vector<EsEntry> entries;  // sorted; bin 0 holds the highest scores
  std::size_t num_bins = 0;
  std::vector<std::string> warnings;

  std::vector<std::size_t> bin_sizes() const;
};

// Pairs ordered by (max_score, predicate, entity) descending, then split into
// `bins` contiguous groups whose sizes differ by at most one, larger groups
// first. With fewer pairs than bins every pair gets its own bin.
EsBinning es_bin(const std::vector<Prediction>& predictions, Orientation orientation,
                 std::size_t bins = kEsBins);

// entity, predicate, compatible, reason
void write_km(const std::vector<KmVerdict>& verdicts, const KnowledgeGraph& kg,
              const std::filesystem::path& path);
std::vector<KmVerdict> read_km(const std::filesystem::path& path, const KnowledgeGraph& kg,
                               Orientation orientation);

// entity, predicate, max_score, bin
void write_es(const EsBinning& binning, const KnowledgeGraph& kg,
              const std::filesystem::path& path);
EsBinning read_es(const std::filesystem::path& path, const KnowledgeGraph& kg,
                  Orientation orientation);

}  // namespace kgenrich
