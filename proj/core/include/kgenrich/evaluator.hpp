#pragma once
// Automatic evaluation against the test split, and the annotation sample
// used for manual evaluation.
//
// A pair counts as a hit when some test triplet completes it in the pair's
// own orientation. Recall is not computed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgenrich/guidance.hpp"
#include "kgenrich/kg.hpp"
#include "kgenrich/predictor.hpp"

namespace kgenrich {

// Number of distinct predicted triplets found in the test split.
std::size_t hit_triplets(const std::vector<Triplet>& predictions, const KnowledgeGraph& kg);
std::size_t hit_triplets(const std::vector<Prediction>& predictions, const KnowledgeGraph& kg);

// Pairs completed by at least one test triplet.
class TestPairIndex {
 public:
  explicit TestPairIndex(const KnowledgeGraph& kg);
  bool covered(const EntityPredicatePair& pair) const { return pairs_.count(pair) != 0; }

 private:
  std::unordered_set<EntityPredicatePair, PairHash> pairs_;
};

// Throws std::invalid_argument when `pairs` is empty.
double pair_precision(const std::vector<EntityPredicatePair>& pairs, const KnowledgeGraph& kg);
double pair_precision(const std::vector<EntityPredicatePair>& pairs, const TestPairIndex& index);

struct GroupPrecision {
  std::string label;
  std::size_t pairs = 0;
  std::size_t covered = 0;
  std::optional<double> precision;  // empty for a group without pairs
};

// group_of[i] in [0, labels.size()) assigns pairs[i] to a group.
std::vector<GroupPrecision> group_precision(const std::vector<EntityPredicatePair>& pairs,
                                            const std::vector<std::size_t>& group_of,
                                            const std::vector<std::string>& labels,
                                            const KnowledgeGraph& kg);

// "compatible" then "incompatible".
std::vector<GroupPrecision> km_precision(const std::vector<KmVerdict>& verdicts,
                                         const KnowledgeGraph& kg);
// One entry per bin, in bin order.
std::vector<GroupPrecision> es_precision(const EsBinning& binning, const KnowledgeGraph& kg);

struct EvalReport {
  std::string method;
  Orientation orientation = Orientation::SubjectKnown;
  std::size_t predictions = 0;
  std::size_t hit_triplets = 0;
  std::size_t pair_count = 0;
  std::size_t covered_pairs = 0;
  double pair_precision = 0.0;
  std::vector<GroupPrecision> groups;
};

EvalReport evaluate(const std::string& method, const std::vector<Prediction>& predictions,
                    const KnowledgeGraph& kg, Orientation orientation);

std::string format_eval_text(const EvalReport& report);
// Header row, then `key<TAB>value` rows and one row per group.
std::string format_eval_tsv(const EvalReport& report);
// `bin<TAB>precision`, "n/a" for empty bins.
std::string format_bin_precision(const std::vector<GroupPrecision>& bins);

struct AnnotationExport {
  std::vector<EntityPredicatePair> rows;
  std::vector<std::string> warnings;
};

// Uniform sample of `n` distinct pairs without replacement. The result
// depends on the pair set and the seed, not on input order.
AnnotationExport export_annotation_sample(const std::vector<EntityPredicatePair>& pairs,
                                          const KnowledgeGraph& kg, std::size_t n,
                                          std::uint64_t seed, const std::filesystem::path& path);

struct RcResult {
  std::size_t rows = 0;
  std::size_t correct = 0;
  std::size_t relevant_and_correct = 0;
  std::size_t relevant_not_correct = 0;  // flagged, counted in neither term
  std::vector<std::size_t> flagged_lines;
  double ratio = 0.0;
};

// Reads an annotated sample. Throws ParseError for an unfilled or malformed
// cell, std::invalid_argument when no row is marked correct.
RcResult rc_ratio(const std::filesystem::path& path);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kgenrich
