#include "kgenrich/kg.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "kgenrich/text_io.hpp"

namespace kgenrich {

VocabId Vocabulary::intern(std::string_view label) {
  if (label.empty()) throw std::invalid_argument("cannot intern an empty label");
  if (auto it = index_.find(label); it != index_.end()) return it->second;
  if (frozen_) throw std::logic_error("vocabulary is frozen, unknown label: " + std::string(label));
  auto id = static_cast<VocabId>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

std::optional<VocabId> Vocabulary::find(std::string_view label) const {
  if (auto it = index_.find(label); it != index_.end()) return it->second;
  return std::nullopt;
}

VocabId Vocabulary::id_of(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw std::out_of_range("unknown label: " + std::string(label));
}

const std::string& Vocabulary::label(VocabId id) const {
  if (id >= labels_.size()) throw std::out_of_range("vocabulary id out of range: " + std::to_string(id));
  return labels_[id];
}

void Vocabulary::save(const std::filesystem::path& path) const {
  auto out = open_output(path);
  for (const auto& l : labels_) out << l << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  auto in = open_input(path);
  Vocabulary vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty())
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": empty label");
    if (vocab.intern(line) != line_no - 1)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": duplicate label");
  }
  vocab.freeze();
  return vocab;
}

const char* to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "?";
}

const char* to_string(Orientation o) {
  return o == Orientation::SubjectKnown ? "SubjectKnown" : "ObjectKnown";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "SubjectKnown" || text == "subject") return Orientation::SubjectKnown;
  if (text == "ObjectKnown" || text == "object") return Orientation::ObjectKnown;
  throw std::invalid_argument("unknown orientation: " + std::string(text));
}

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary predicates)
    : entities_(std::move(entities)), predicates_(std::move(predicates)) {
  entities_.freeze();
  predicates_.freeze();
}

void KnowledgeGraph::check_ids(const Triplet& t) const {
  if (!entities_.contains(t.head) || !entities_.contains(t.tail) ||
      !predicates_.contains(t.predicate))
    throw std::out_of_range("triplet references an unknown id");
}

bool KnowledgeGraph::add(const Triplet& t, Split split) {
  check_ids(t);
  auto [it, inserted] = index_.emplace(t, triplets_.size());
  if (!inserted) return false;
  triplets_.push_back(t);
  splits_.push_back(split);
  return true;
}

void KnowledgeGraph::assign(std::size_t index, Split split) { splits_.at(index) = split; }

bool KnowledgeGraph::contains(const Triplet& t, SplitScope scope) const {
  check_ids(t);
  auto it = index_.find(t);
  return it != index_.end() && scope.includes(splits_[it->second]);
}

std::optional<Split> KnowledgeGraph::split_of(const Triplet& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return splits_[it->second];
}

std::vector<Triplet> KnowledgeGraph::triplets_in(SplitScope scope) const {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < triplets_.size(); ++i)
    if (scope.includes(splits_[i])) out.push_back(triplets_[i]);
  return out;
}

std::size_t KnowledgeGraph::count(Split split) const {
  return static_cast<std::size_t>(std::count(splits_.begin(), splits_.end(), split));
}

std::vector<EntityPredicatePair> pairs_of(const KnowledgeGraph& kg, SplitScope scope,
                                          Orientation orientation) {
  std::unordered_set<EntityPredicatePair, PairHash> seen;
  std::vector<EntityPredicatePair> out;
  for (std::size_t i = 0; i < kg.size(); ++i) {
    if (!scope.includes(kg.split_at(i))) continue;
    auto p = pair_of(kg.triplets()[i], orientation);
    if (seen.insert(p).second) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace kgenrich
