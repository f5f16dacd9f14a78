#include "kgenrich/guidance.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "kgenrich/text_io.hpp"

namespace kgenrich {

const char* to_string(KmReason reason) {
  switch (reason) {
    case KmReason::DomainMatch: return "DomainMatch";
    case KmReason::DomainMismatch: return "DomainMismatch";
    case KmReason::MissingEntityType: return "MissingEntityType";
    case KmReason::MissingPredicateConstraint: return "MissingPredicateConstraint";
    case KmReason::MissingBoth: return "MissingBoth";
  }
  return "?";
}

KmReason parse_km_reason(std::string_view text) {
  for (auto r : {KmReason::DomainMatch, KmReason::DomainMismatch, KmReason::MissingEntityType,
                 KmReason::MissingPredicateConstraint, KmReason::MissingBoth})
    if (text == to_string(r)) return r;
  throw std::invalid_argument("unknown KM reason: " + std::string(text));
}

KmVerdict km_classify(const EntityPredicatePair& pair, const MetadataTable& metadata,
                      const KnowledgeGraph& kg) {
  if (pair.entity >= kg.num_entities() || pair.predicate >= kg.num_predicates())
    throw std::out_of_range("pair id outside the KG");
  const auto& constraints = pair.orientation == Orientation::SubjectKnown
                                ? metadata.predicate_domains
                                : metadata.predicate_ranges;
  auto types = metadata.entity_types.find(pair.entity);
  auto allowed = constraints.find(pair.predicate);
  const bool has_types = types != metadata.entity_types.end() && !types->second.empty();
  const bool has_constraint = allowed != constraints.end() && !allowed->second.empty();

  KmVerdict v{pair, false, KmReason::MissingBoth};
  if (!has_types && !has_constraint) return v;
  if (!has_types) {
    v.reason = KmReason::MissingEntityType;
    return v;
  }
  if (!has_constraint) {
    v.reason = KmReason::MissingPredicateConstraint;
    return v;
  }
  v.compatible = std::any_of(types->second.begin(), types->second.end(),
                             [&](const std::string& t) { return allowed->second.count(t) != 0; });
  v.reason = v.compatible ? KmReason::DomainMatch : KmReason::DomainMismatch;
  return v;
}

std::vector<EntityPredicatePair> prediction_pairs(const std::vector<Prediction>& predictions,
                                                  Orientation orientation) {
  std::vector<EntityPredicatePair> out;
  std::unordered_set<EntityPredicatePair, PairHash> seen;
  for (const auto& p : predictions) {
    auto pair = pair_of(p.triplet, orientation);
    if (seen.insert(pair).second) out.push_back(pair);
  }
  return out;
}

std::vector<KmVerdict> km_partition(const std::vector<EntityPredicatePair>& pairs,
                                    const MetadataTable& metadata, const KnowledgeGraph& kg) {
  std::vector<KmVerdict> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(km_classify(p, metadata, kg));
  return out;
}

std::vector<std::size_t> EsBinning::bin_sizes() const {
  std::vector<std::size_t> sizes(num_bins, 0);
  for (const auto& e : entries) ++sizes[e.bin];
  return sizes;
}

EsBinning es_bin(const std::vector<Prediction>& predictions, Orientation orientation,
                 std::size_t bins) {
  if (predictions.empty()) throw std::invalid_argument("no predictions to bin");
  if (bins == 0) throw std::invalid_argument("bin count must be positive");

  std::unordered_map<EntityPredicatePair, std::size_t, PairHash> index;
  EsBinning out;
  for (const auto& p : predictions) {
    auto pair = pair_of(p.triplet, orientation);
    auto [it, inserted] = index.emplace(pair, out.entries.size());
    if (inserted)
      out.entries.push_back({pair, p.score, 0});
    else
      out.entries[it->second].max_score = std::max(out.entries[it->second].max_score, p.score);
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const EsEntry& a, const EsEntry& b) {
    if (a.max_score != b.max_score) return a.max_score > b.max_score;
    if (a.pair.predicate != b.pair.predicate) return a.pair.predicate > b.pair.predicate;
    return a.pair.entity > b.pair.entity;
  });

  const std::size_t n = out.entries.size();
  if (n < bins) {
    out.warnings.push_back("only " + std::to_string(n) + " pairs for " + std::to_string(bins) +
                           " bins; using one bin per pair");
    bins = n;
  }
  out.num_bins = bins;
  const std::size_t base = n / bins;
  const std::size_t extra = n % bins;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) out.entries[pos++].bin = b;
  }
  return out;
}

void write_km(const std::vector<KmVerdict>& verdicts, const KnowledgeGraph& kg,
              const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& v : verdicts)
    out << kg.entities().label(v.pair.entity) << '\t' << kg.predicates().label(v.pair.predicate)
        << '\t' << (v.compatible ? "true" : "false") << '\t' << to_string(v.reason) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<KmVerdict> read_km(const std::filesystem::path& path, const KnowledgeGraph& kg,
                               Orientation orientation) {
  auto in = open_input(path);
  std::vector<KmVerdict> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto f = split_fields(line);
      if (f.size() != 4) throw std::invalid_argument("expected 4 fields");
      if (f[2] != "true" && f[2] != "false") throw std::invalid_argument("bad compatible flag");
      KmVerdict v{{kg.entities().id_of(f[0]), kg.predicates().id_of(f[1]), orientation},
                  f[2] == "true", parse_km_reason(f[3])};
      out.push_back(v);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_es(const EsBinning& binning, const KnowledgeGraph& kg,
              const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& e : binning.entries)
    out << kg.entities().label(e.pair.entity) << '\t' << kg.predicates().label(e.pair.predicate)
        << '\t' << format_real(e.max_score) << '\t' << e.bin << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

EsBinning read_es(const std::filesystem::path& path, const KnowledgeGraph& kg,
                  Orientation orientation) {
  auto in = open_input(path);
  EsBinning out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto f = split_fields(line);
      if (f.size() != 4) throw std::invalid_argument("expected 4 fields");
      EsEntry e{{kg.entities().id_of(f[0]), kg.predicates().id_of(f[1]), orientation},
                parse_real(f[2]), static_cast<std::size_t>(parse_count(f[3]))};
      out.num_bins = std::max(out.num_bins, e.bin + 1);
      out.entries.push_back(e);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace kgenrich
