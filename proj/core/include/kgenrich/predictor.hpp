#pragma once
// Missing-triplet prediction from a trained RotatE model.
//
// RS: draw a predicate from its train-split marginal, head and tail
//     uniformly over the entities, and accept with probability
//     e^{score - gamma}. Accepted triplets are therefore distributed
//     proportionally to e^{score} within each predicate.
// QG: draw a guiding (entity, predicate) pair mined from queries and only
//     the missing entity uniformly; accept the same way.
// TopK: take the k most frequent query pairs and complete each with its m
//     best-scoring entities by exhaustive scoring.
//
// Proposals are generated in fixed-size chunks, each from its own seeded
// stream, and merged in chunk order, so results depend on the seed only and
// not on the worker count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgenrich/kg.hpp"
#include "kgenrich/query_log.hpp"
#include "kgenrich/rotate.hpp"

namespace kgenrich {

enum class Method { RS, QG, TopK };

const char* to_string(Method m);
Method parse_method(std::string_view text);

struct Prediction {
  Triplet triplet;
  double score = 0.0;
  Method method = Method::RS;
  std::optional<EntityPredicatePair> guiding_pair;  // set for QG and TopK
};

class StarvationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability of each predicate, from train-split frequencies.
class PredicateMarginal {
 public:
  static PredicateMarginal from_train(const KnowledgeGraph& kg);
  explicit PredicateMarginal(std::vector<double> weights);

  double probability(VocabId r) const { return r < probs_.size() ? probs_[r] : 0.0; }
  const std::vector<double>& probabilities() const { return probs_; }
  std::vector<VocabId> support() const;

  // A fresh sampler; each proposal stream owns its own copy.
  std::discrete_distribution<VocabId> distribution() const {
    return std::discrete_distribution<VocabId>(probs_.begin(), probs_.end());
  }

 private:
  std::vector<double> probs_;
};

// e^{min(score, gamma) - gamma}. Throws std::invalid_argument for a
// non-finite score or non-positive gamma.
double accept_probability(double score, double gamma);

struct SamplerOptions {
  std::size_t chunk_size = 1024;          // proposals per seeded chunk
  std::size_t chunks_per_batch = 8;
  std::size_t max_empty_batches = 10000;  // starvation threshold
  unsigned threads = 1;
};

enum class PairWeighting { Uniform, Frequency };

struct QgOptions {
  Orientation orientation = Orientation::SubjectKnown;
  PairWeighting weighting = PairWeighting::Uniform;
};

struct ProposalStats {
  std::uint64_t batches = 0;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;          // passed the acceptance test
  std::uint64_t duplicates = 0;        // accepted but already predicted
  std::uint64_t known = 0;             // accepted but in train or dev
  std::uint64_t predicate_draws = 0;
  std::uint64_t entity_draws = 0;
  std::uint64_t pair_draws = 0;
  // Size of the space one proposal is drawn from: |E|^2 |P| for RS (the
  // predicate marginal's support is counted as |P|) and |E| for QG.
  std::uint64_t candidate_space = 0;
};

struct PredictionRun {
  std::vector<Prediction> predictions;
  ProposalStats stats;
  std::vector<std::string> warnings;
};

// Accepted RS proposals without deduplication or exclusion of known
// triplets. This is the raw sampler underneath predict_rs.
std::vector<Triplet> sample_rs_accepted(const RotatEModel& model,
                                        const PredicateMarginal& marginal, std::size_t count,
                                        std::uint64_t seed, const SamplerOptions& options = {});

// Exactly `n` distinct predictions outside train and dev.
PredictionRun predict_rs(const RotatEModel& model, const KnowledgeGraph& kg, std::size_t n,
                         std::uint64_t seed, const SamplerOptions& options = {});

PredictionRun predict_qg(const RotatEModel& model, const KnowledgeGraph& kg,
                         const QueryPairTable& pairs, std::size_t n, std::uint64_t seed,
                         const QgOptions& qg = {}, const SamplerOptions& options = {});

// Deterministic; ties in frequency go to the smaller (predicate, entity),
// ties in score to the smaller entity id.
PredictionRun predict_topk(const RotatEModel& model, const KnowledgeGraph& kg,
                           const QueryPairTable& pairs, std::size_t k, std::size_t per_pair_m,
                           Orientation orientation = Orientation::SubjectKnown);

// TSV: head, predicate, tail, score, method, pair_entity, pair_predicate
// (last two empty for RS).
void write_predictions(const std::vector<Prediction>& predictions, const KnowledgeGraph& kg,
                       const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         const KnowledgeGraph& kg);

std::string format_proposal_stats(const ProposalStats& stats);

}  // namespace kgenrich
