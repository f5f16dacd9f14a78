#include "kgenrich/query_log.hpp"

#include <sstream>
#include <stdexcept>

#include "kgenrich/text_io.hpp"

namespace kgenrich {

double LogStatistics::select_fraction() const {
  if (total_queries == 0) return 0.0;
  return static_cast<double>(count(QueryForm::Select)) / static_cast<double>(total_queries);
}

std::set<std::string> MinedPairs::entity_labels() const {
  std::set<std::string> out;
  for (const auto& [pair, _] : frequencies) out.insert(pair.entity);
  return out;
}

std::set<std::string> MinedPairs::predicate_labels() const {
  std::set<std::string> out;
  for (const auto& [pair, _] : frequencies) out.insert(pair.predicate);
  return out;
}

MinedPairs mine_log(std::istream& in, bool decode) {
  MinedPairs mined;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++mined.stats.total_queries;
    SparqlQuery q = parse_query(decode ? percent_decode(line) : line);
    ++mined.stats.per_form[static_cast<std::size_t>(q.form)];
    if (q.form != QueryForm::Select) continue;
    if (!q.extractable) {
      ++mined.stats.unextractable;
      continue;
    }
    for (auto& pair : extract_pairs(q)) {
      ++mined.stats.pair_occurrences;
      ++mined.frequencies[std::move(pair)];
    }
  }
  return mined;
}

MinedPairs mine_log(const std::filesystem::path& path, bool decode) {
  auto in = open_input(path);
  return mine_log(in, decode);
}

void QueryPairTable::add(const EntityPredicatePair& pair, std::uint64_t frequency) {
  if (frequency == 0) throw std::invalid_argument("pair frequency must be positive");
  counts_[pair] += frequency;
}

std::vector<QueryPairTable::Entry> QueryPairTable::entries() const {
  std::vector<Entry> out;
  out.reserve(counts_.size());
  for (const auto& [pair, freq] : counts_) out.push_back({pair, freq});
  return out;
}

std::vector<QueryPairTable::Entry> QueryPairTable::entries(Orientation o) const {
  std::vector<Entry> out;
  for (const auto& [pair, freq] : counts_)
    if (pair.orientation == o) out.push_back({pair, freq});
  return out;
}

std::uint64_t QueryPairTable::frequency(const EntityPredicatePair& pair) const {
  auto it = counts_.find(pair);
  return it == counts_.end() ? 0 : it->second;
}

std::size_t QueryPairTable::size(Orientation o) const {
  std::size_t n = 0;
  for (const auto& [pair, _] : counts_) n += pair.orientation == o;
  return n;
}

std::uint64_t QueryPairTable::total_frequency(Orientation o) const {
  std::uint64_t n = 0;
  for (const auto& [pair, freq] : counts_)
    if (pair.orientation == o) n += freq;
  return n;
}

QueryPairTable resolve_pairs(const MinedPairs& mined, const KnowledgeGraph& kg,
                             LogStatistics& stats) {
  QueryPairTable table;
  for (const auto& [qp, freq] : mined.frequencies) {
    auto entity = kg.entities().find(qp.entity);
    auto predicate = kg.predicates().find(qp.predicate);
    if (!entity || !predicate) {
      ++stats.dropped_pairs;
      stats.dropped_occurrences += freq;
      continue;
    }
    table.add({*entity, *predicate, qp.orientation}, freq);
  }
  return table;
}

PairTableBuild build_pair_table(const std::filesystem::path& log_path, const KnowledgeGraph& kg,
                                bool decode) {
  MinedPairs mined = mine_log(log_path, decode);
  PairTableBuild build;
  build.stats = mined.stats;
  build.table = resolve_pairs(mined, kg, build.stats);
  return build;
}

void write_pair_table(const QueryPairTable& table, const KnowledgeGraph& kg,
                      const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& e : table.entries()) {
    out << kg.entities().label(e.pair.entity) << '\t' << kg.predicates().label(e.pair.predicate)
        << '\t' << to_string(e.pair.orientation) << '\t' << e.frequency << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

QueryPairTable read_pair_table(const std::filesystem::path& path, const KnowledgeGraph& kg) {
  auto in = open_input(path);
  QueryPairTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split_fields(line);
    try {
      if (f.size() != 4) throw std::invalid_argument("expected 4 fields");
      table.add({kg.entities().id_of(f[0]), kg.predicates().id_of(f[1]), parse_orientation(f[2])},
                parse_count(f[3]));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

std::string format_log_statistics(const LogStatistics& stats) {
  std::ostringstream os;
  os << "queries=" << stats.total_queries << '\n';
  for (std::size_t f = 0; f < kNumQueryForms; ++f)
    os << "form." << to_string(static_cast<QueryForm>(f)) << '=' << stats.per_form[f] << '\n';
  os << "select_fraction=" << format_real(stats.select_fraction()) << '\n';
  os << "unextractable_select=" << stats.unextractable << '\n';
  os << "pair_occurrences=" << stats.pair_occurrences << '\n';
  os << "dropped_pairs=" << stats.dropped_pairs << '\n';
  os << "dropped_occurrences=" << stats.dropped_occurrences << '\n';
  return os.str();
}

}  // namespace kgenrich
