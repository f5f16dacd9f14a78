#pragma once
// Core knowledge-graph data model.
//
// Entities and predicates are interned into two dense vocabularies so that
// embedding tables can be indexed directly by id. Triplets are stored once,
// each carrying the split it belongs to; membership is a hash lookup keyed on
// (head, predicate, tail).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgenrich {

using VocabId = std::uint32_t;

class Vocabulary {
 public:
  // Returns the id of `label`, assigning the next dense id on first sight.
  // Throws std::invalid_argument for an empty label and std::logic_error when
  // the vocabulary is frozen and the label is new.
  VocabId intern(std::string_view label);

  std::optional<VocabId> find(std::string_view label) const;
  // Like find(), but an unknown label is an error.
  VocabId id_of(std::string_view label) const;
  const std::string& label(VocabId id) const;

  bool contains(VocabId id) const { return id < labels_.size(); }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  // One label per line, line number = id.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VocabId, StringHash, std::equal_to<>> index_;
  bool frozen_ = false;
};

struct Triplet {
  VocabId head = 0;
  VocabId predicate = 0;
  VocabId tail = 0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct TripletHash {
  std::size_t operator()(const Triplet& t) const noexcept {
    std::uint64_t h = t.head;
    h = h * 0x9E3779B97F4A7C15ull + t.predicate;
    h = h * 0x9E3779B97F4A7C15ull + t.tail;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

enum class Split : std::uint8_t { Train = 0, Dev = 1, Test = 2 };

const char* to_string(Split split);

// Bit set over splits.
class SplitScope {
 public:
  constexpr SplitScope() = default;
  constexpr SplitScope(std::initializer_list<Split> splits) {
    for (Split s : splits) bits_ |= bit(s);
  }
  static constexpr SplitScope all() { return {Split::Train, Split::Dev, Split::Test}; }
  static constexpr SplitScope train_dev() { return {Split::Train, Split::Dev}; }

  constexpr bool includes(Split s) const { return (bits_ & bit(s)) != 0; }

 private:
  static constexpr std::uint8_t bit(Split s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

enum class Orientation : std::uint8_t { SubjectKnown, ObjectKnown };

const char* to_string(Orientation o);
Orientation parse_orientation(std::string_view text);

// A triplet with one entity slot open. For SubjectKnown the entity is the
// head and the tail is missing; for ObjectKnown the reverse.
struct EntityPredicatePair {
  VocabId entity = 0;
  VocabId predicate = 0;
  Orientation orientation = Orientation::SubjectKnown;

  friend bool operator==(const EntityPredicatePair&, const EntityPredicatePair&) = default;
  // Ordered by (predicate, entity, orientation) so that sorted pair lists
  // follow the tie-break rule used across the project.
  friend auto operator<=>(const EntityPredicatePair& a, const EntityPredicatePair& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    if (auto c = a.entity <=> b.entity; c != 0) return c;
    return a.orientation <=> b.orientation;
  }
};

struct PairHash {
  std::size_t operator()(const EntityPredicatePair& p) const noexcept {
    std::uint64_t h = p.entity;
    h = h * 0x9E3779B97F4A7C15ull + p.predicate;
    h = h * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(p.orientation);
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

// The pair a triplet instantiates under the given orientation.
inline EntityPredicatePair pair_of(const Triplet& t, Orientation o) {
  return {o == Orientation::SubjectKnown ? t.head : t.tail, t.predicate, o};
}

class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(Vocabulary entities, Vocabulary predicates);

  // Adds a triplet to `split`. Returns false if it is already stored (in any
  // split). Throws std::out_of_range on unresolvable ids.
  bool add(const Triplet& t, Split split = Split::Train);

  // Moves a stored triplet to another split.
  void assign(std::size_t index, Split split);

  bool contains(const Triplet& t, SplitScope scope = SplitScope::all()) const;
  std::optional<Split> split_of(const Triplet& t) const;

  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& predicates() const { return predicates_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }
  Split split_at(std::size_t index) const { return splits_[index]; }
  std::size_t size() const { return triplets_.size(); }

  std::vector<Triplet> triplets_in(SplitScope scope) const;
  std::size_t count(Split split) const;

  std::size_t num_entities() const { return entities_.size(); }
  std::size_t num_predicates() const { return predicates_.size(); }

  void check_ids(const Triplet& t) const;

 private:
  Vocabulary entities_;
  Vocabulary predicates_;
  std::vector<Triplet> triplets_;
  std::vector<Split> splits_;
  std::unordered_map<Triplet, std::size_t, TripletHash> index_;
};

// Distinct pairs occurring among triplets in `scope`, sorted.
std::vector<EntityPredicatePair> pairs_of(const KnowledgeGraph& kg, SplitScope scope,
                                          Orientation orientation);

}  // namespace kgenrich
