#pragma once
// RotatE knowledge-graph embeddings.
//
// Entities are complex vectors, stored per entity as d real parts followed by
// d imaginary parts. Predicates are element-wise rotations parameterised by
// phases, so every rotation coordinate has modulus exactly one.
//
//   distance(h, r, t) = || h o e^{i theta_r} - t ||
//   score(h, r, t)    = gamma - distance(h, r, t)          (always <= gamma)
//   loss = -log sigmoid(s_pos) - sum_i (1/k) log sigmoid(-s_neg_i)

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "kgenrich/kg.hpp"

namespace kgenrich {

enum class Norm { L1, L2 };

const char* to_string(Norm norm);
Norm parse_norm(std::string_view text);

struct TrainConfig {
  std::size_t dim = 200;
  double gamma = 12.0;
  std::size_t negatives = 8;        // n
  double negative_weight = 0.0;     // k; 0 selects k = n
  double learning_rate = 1e-2;
  std::size_t epochs = 50;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  Norm norm = Norm::L1;
  unsigned threads = 1;             // gradient workers; does not change results

  double effective_negative_weight() const {
    return negative_weight > 0 ? negative_weight : static_cast<double>(negatives);
  }
  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

class RotatEModel {
 public:
  RotatEModel() = default;
  RotatEModel(std::size_t num_entities, std::size_t num_predicates, std::size_t dim, double gamma,
              Norm norm = Norm::L1);

  // Entity components uniform in [-0.5 gamma/d, 0.5 gamma/d]; phases uniform
  // in [-pi, pi].
  static RotatEModel initialized(std::size_t num_entities, std::size_t num_predicates,
                                 std::size_t dim, double gamma, Norm norm, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  double gamma() const { return gamma_; }
  Norm norm() const { return norm_; }
  std::size_t num_entities() const { return dim_ ? entities_.size() / (2 * dim_) : 0; }
  std::size_t num_predicates() const { return dim_ ? phases_.size() / dim_ : 0; }

  // [re_0 .. re_{d-1}, im_0 .. im_{d-1}]
  std::span<double> entity(VocabId id) { return {entities_.data() + 2 * dim_ * id, 2 * dim_}; }
  std::span<const double> entity(VocabId id) const {
    return {entities_.data() + 2 * dim_ * id, 2 * dim_};
  }
  std::span<double> phases(VocabId id) { return {phases_.data() + dim_ * id, dim_}; }
  std::span<const double> phases(VocabId id) const { return {phases_.data() + dim_ * id, dim_}; }

  const std::vector<double>& entity_table() const { return entities_; }
  const std::vector<double>& phase_table() const { return phases_; }

  double distance(VocabId h, VocabId r, VocabId t) const;
  double score(VocabId h, VocabId r, VocabId t) const { return gamma_ - distance(h, r, t); }
  double distance(const Triplet& t) const { return distance(t.head, t.predicate, t.tail); }
  double score(const Triplet& t) const { return score(t.head, t.predicate, t.tail); }

  // h o r, as [re.., im..].
  std::vector<double> rotate(VocabId h, VocabId r) const;

  // Throws std::invalid_argument when the tables do not fit `kg`.
  void check_compatible(const KnowledgeGraph& kg) const;

  friend bool operator==(const RotatEModel&, const RotatEModel&) = default;

 private:
  std::size_t dim_ = 0;
  double gamma_ = 0.0;
  Norm norm_ = Norm::L1;
  std::vector<double> entities_;
  std::vector<double> phases_;
};

double log_sigmoid(double x);

double loss(const RotatEModel& model, const Triplet& positive, std::span<const Triplet> negatives,
            const TrainConfig& config);

// Sparse gradient of the loss: only parameters of the involved ids appear.
struct Gradient {
  std::map<VocabId, std::vector<double>> entities;    // 2d components each
  std::map<VocabId, std::vector<double>> predicates;  // d phases each

  std::span<const double> entity(VocabId id) const;
  std::span<const double> predicate(VocabId id) const;
};

// Analytic gradient. Also returns the loss value through `loss_out` when
// non-null. At a zero-modulus coordinate (L1) or zero distance (L2) the
// subgradient 0 is used.
Gradient gradients(const RotatEModel& model, const Triplet& positive,
                   std::span<const Triplet> negatives, const TrainConfig& config,
                   double* loss_out = nullptr);

struct TrainResult {
  RotatEModel model;
  std::vector<double> epoch_loss;  // mean per-example loss of each epoch
};

// Mini-batch SGD over the train split. Negatives corrupt the head or the tail
// (fair coin) with a uniform entity, resampled when the corruption is itself
// a train triplet. Bit-identical output for a given config and seed,
// regardless of `threads`.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config);

// Text checkpoint: header `rotate v1`, `dim=`, `gamma=`, `norm=`,
// `entities=`, `predicates=`, then one row per entity (2d reals) and one per
// predicate (d phases), 17 significant digits.
void save_model(const RotatEModel& model, const std::filesystem::path& path);
RotatEModel load_model(const std::filesystem::path& path);

}  // namespace kgenrich
