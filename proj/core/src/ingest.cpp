#include "kgenrich/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <tuple>
#include <unordered_set>
#include <sstream>

#include "kgenrich/random.hpp"
#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

constexpr std::size_t kMaxMalformedSamples = 10;

class GraphBuilder {
 public:
  explicit GraphBuilder(const LoadOptions& options) : options_(options) {}

  void add(std::string_view h, std::string_view r, std::string_view t) {
    Triplet tr{raw_.entities.intern(h), raw_.predicates.intern(r), raw_.entities.intern(t)};
    if (seen_.insert(tr).second) {
      raw_.triplets.push_back(tr);
      ++raw_.report.triplets;
    } else {
      ++raw_.report.duplicates;
    }
  }

  void malformed(std::size_t line_no, std::string_view line, std::string_view why) {
    std::string msg = "line " + std::to_string(line_no) + ": " + std::string(why);
    if (options_.strict) throw ParseError(msg + ": " + std::string(line));
    ++raw_.report.malformed;
    if (raw_.report.malformed_samples.size() < kMaxMalformedSamples)
      raw_.report.malformed_samples.push_back(msg);
  }

  RawGraph& raw() { return raw_; }

 private:
  LoadOptions options_;
  RawGraph raw_;
  std::unordered_set<Triplet, TripletHash> seen_;
};

// Reads `<iri>` at the front of `s`, advancing past it.
bool take_iri(std::string_view& s, std::string_view& iri) {
  s = trim(s);
  if (s.empty() || s.front() != '<') return false;
  auto end = s.find('>');
  if (end == std::string_view::npos || end == 1) return false;
  iri = s.substr(1, end - 1);
  if (iri.find_first_of(" \t\"<") != std::string_view::npos) return false;
  s.remove_prefix(end + 1);
  return true;
}

bool is_absolute_url(std::string_view s) {
  auto scheme_end = s.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (std::size_t i = 1; i < scheme_end; ++i) {
    char c = s[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '.' || c == '-'))
      return false;
  }
  return true;
}

}  // namespace

RawGraph load_ntriples(std::istream& in, const LoadOptions& options) {
  GraphBuilder builder(options);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++builder.raw().report.lines;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    std::string_view subject, predicate, object;
    if (!take_iri(s, subject)) {
      builder.malformed(line_no, line, "subject is not an IRI");
      continue;
    }
    if (!take_iri(s, predicate)) {
      builder.malformed(line_no, line, "predicate is not an IRI");
      continue;
    }
    s = trim(s);
    if (!s.empty() && s.front() == '"') {
      if (s.back() != '.') {
        builder.malformed(line_no, line, "missing terminating '.'");
        continue;
      }
      ++builder.raw().report.literals;
      continue;
    }
    if (!take_iri(s, object)) {
      builder.malformed(line_no, line, "object is neither an IRI nor a literal");
      continue;
    }
    if (trim(s) != ".") {
      builder.malformed(line_no, line, "missing terminating '.'");
      continue;
    }
    builder.add(subject, predicate, object);
  }
  return std::move(builder.raw());
}

RawGraph load_ntriples(const std::filesystem::path& path, const LoadOptions& options) {
  auto in = open_input(path);
  return load_ntriples(in, options);
}

RawGraph load_tsv(std::istream& in, const LoadOptions& options) {
  GraphBuilder builder(options);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++builder.raw().report.lines;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 3) {
      builder.malformed(line_no, line, "expected 3 tab-separated fields");
      continue;
    }
    if (f[0].empty() || f[1].empty() || f[2].empty()) {
      builder.malformed(line_no, line, "empty field");
      continue;
    }
    builder.add(f[0], f[1], f[2]);
  }
  return std::move(builder.raw());
}

RawGraph load_tsv(const std::filesystem::path& path, const LoadOptions& options) {
  auto in = open_input(path);
  return load_tsv(in, options);
}

RawGraph load_graph(const std::filesystem::path& path, const LoadOptions& options) {
  if (path.extension() == ".nt") return load_ntriples(path, options);
  return load_tsv(path, options);
}

RawGraph to_raw(const KnowledgeGraph& kg) {
  RawGraph raw;
  raw.entities = kg.entities();
  raw.predicates = kg.predicates();
  raw.triplets = kg.triplets();
  raw.report.triplets = kg.size();
  return raw;
}

QueryTerms QueryTerms::from(const MinedPairs& mined) {
  return {mined.entity_labels(), mined.predicate_labels()};
}

std::string_view local_name(std::string_view label) {
  auto pos = label.find_last_of("/#");
  return pos == std::string_view::npos ? label : label.substr(pos + 1);
}

bool is_url_or_number_entity(std::string_view label) {
  auto local = local_name(label);
  if (!local.empty() &&
      std::all_of(local.begin(), local.end(), [](unsigned char c) { return std::isdigit(c); }))
    return true;
  if (!is_absolute_url(label)) return false;
  if (local.empty()) return true;
  // scheme://host with no path at all
  auto after_scheme = label.substr(label.find("://") + 3);
  return after_scheme.find('/') == std::string_view::npos &&
         after_scheme.find('#') == std::string_view::npos;
}

bool is_list_entity(std::string_view label, std::string_view list_prefix) {
  return starts_with_icase(local_name(label), list_prefix);
}

SanitizeResult sanitize(const RawGraph& raw, const QueryTerms& terms, const SanitizeRules& rules) {
  SanitizationReport report;
  report.input = raw.triplets.size();

  auto bad_entity = [&](VocabId id, bool& list) {
    const auto& label = raw.entities.label(id);
    if (rules.drop_url_or_number && is_url_or_number_entity(label)) return true;
    if (rules.drop_lists && is_list_entity(label, rules.list_prefix)) {
      list = true;
      return true;
    }
    return false;
  };

  Vocabulary entities, predicates;
  std::vector<Triplet> kept;
  for (const auto& t : raw.triplets) {
    bool list_h = false, list_t = false;
    bool bad_h = bad_entity(t.head, list_h);
    bool bad_t = bad_entity(t.tail, list_t);
    if (bad_h || bad_t) {
      bool url_number = (bad_h && !list_h) || (bad_t && !list_t);
      ++(url_number ? report.removed_url_number : report.removed_list);
      continue;
    }
    const auto& h = raw.entities.label(t.head);
    const auto& r = raw.predicates.label(t.predicate);
    const auto& tl = raw.entities.label(t.tail);
    if (rules.require_query_relevance && !terms.predicates.count(r) && !terms.entities.count(h) &&
        !terms.entities.count(tl)) {
      ++report.removed_query_irrelevant;
      continue;
    }
    kept.push_back({entities.intern(h), predicates.intern(r), entities.intern(tl)});
  }
  KnowledgeGraph kg(std::move(entities), std::move(predicates));
  for (const auto& t : kept) kg.add(t, Split::Train);
  report.kept = kg.size();
  return {std::move(kg), report};
}

KnowledgeGraph split(const KnowledgeGraph& kg, const SplitRatios& ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must be non-negative and sum to 1");

  const std::size_t n = kg.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& tr = kg.triplets();
  auto key = [&](std::size_t i) {
    return std::tie(kg.entities().label(tr[i].head), kg.predicates().label(tr[i].predicate),
                    kg.entities().label(tr[i].tail));
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  Rng rng = make_rng(seed, "split");
  std::shuffle(order.begin(), order.end(), rng);

  auto n_dev = static_cast<std::size_t>(std::llround(ratios.dev * static_cast<double>(n)));
  auto n_test = static_cast<std::size_t>(std::llround(ratios.test * static_cast<double>(n)));
  if (n >= 10) {
    if (ratios.dev > 0 && n_dev == 0) n_dev = 1;
    if (ratios.test > 0 && n_test == 0) n_test = 1;
  }
  n_dev = std::min(n_dev, n);
  n_test = std::min(n_test, n - n_dev);
  const std::size_t n_train = n - n_dev - n_test;

  KnowledgeGraph out = kg;
  for (std::size_t k = 0; k < n; ++k) {
    Split s = k < n_train ? Split::Train : (k < n_train + n_dev ? Split::Dev : Split::Test);
    out.assign(order[k], s);
  }
  return out;
}

MetadataTable load_metadata(const std::filesystem::path& entity_type_path,
                            const std::filesystem::path& domain_range_path,
                            const KnowledgeGraph& kg) {
  MetadataTable meta;
  auto add_list = [](std::set<std::string>& into, std::string_view field) {
    for (auto part : split_fields(field, ',')) {
      part = trim(part);
      if (!part.empty()) into.emplace(part);
    }
  };

  {
    auto in = open_input(entity_type_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto f = split_fields(line);
      if (f.size() < 2) {
        meta.warnings.push_back(entity_type_path.string() + ":" + std::to_string(line_no) +
                                ": expected entity and type");
        continue;
      }
      auto id = kg.entities().find(f[0]);
      if (!id) {
        meta.warnings.push_back("unknown entity skipped: " + std::string(f[0]));
        continue;
      }
      std::set<std::string> types;
      for (std::size_t i = 1; i < f.size(); ++i) add_list(types, f[i]);
      if (!types.empty()) meta.entity_types[*id].insert(types.begin(), types.end());
    }
  }
  {
    auto in = open_input(domain_range_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto f = split_fields(line);
      if (f.size() != 3) {
        meta.warnings.push_back(domain_range_path.string() + ":" + std::to_string(line_no) +
                                ": expected predicate, domain and range");
        continue;
      }
      auto id = kg.predicates().find(f[0]);
      if (!id) {
        meta.warnings.push_back("unknown predicate skipped: " + std::string(f[0]));
        continue;
      }
      std::set<std::string> domain, range;
      add_list(domain, f[1]);
      add_list(range, f[2]);
      if (!domain.empty()) meta.predicate_domains[*id].insert(domain.begin(), domain.end());
      if (!range.empty()) meta.predicate_ranges[*id].insert(range.begin(), range.end());
    }
  }
  return meta;
}

std::string format_load_report(const LoadReport& report) {
  std::ostringstream os;
  os << "lines=" << report.lines << '\n'
     << "triplets=" << report.triplets << '\n'
     << "duplicates=" << report.duplicates << '\n'
     << "literals_skipped=" << report.literals << '\n'
     << "malformed=" << report.malformed << '\n';
  return os.str();
}

std::string format_sanitization_report(const SanitizationReport& report) {
  std::ostringstream os;
  os << "input=" << report.input << '\n'
     << "kept=" << report.kept << '\n'
     << "removed_url_number=" << report.removed_url_number << '\n'
     << "removed_list=" << report.removed_list << '\n'
     << "removed_query_irrelevant=" << report.removed_query_irrelevant << '\n';
  return os.str();
}

void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& dir) {
  kg.entities().save(dir / "entities.txt");
  kg.predicates().save(dir / "predicates.txt");
  for (Split s : {Split::Train, Split::Dev, Split::Test}) {
    auto out = open_output(dir / (std::string(to_string(s)) + ".tsv"));
    for (std::size_t i = 0; i < kg.size(); ++i) {
      if (kg.split_at(i) != s) continue;
      const auto& t = kg.triplets()[i];
      out << kg.entities().label(t.head) << '\t' << kg.predicates().label(t.predicate) << '\t'
          << kg.entities().label(t.tail) << '\n';
    }
    if (!out) throw IoError("write failed in " + dir.string());
  }
}

KnowledgeGraph load_kg(const std::filesystem::path& dir) {
  KnowledgeGraph kg(Vocabulary::load(dir / "entities.txt"),
                    Vocabulary::load(dir / "predicates.txt"));
  for (Split s : {Split::Train, Split::Dev, Split::Test}) {
    auto path = dir / (std::string(to_string(s)) + ".tsv");
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto f = split_fields(line);
      if (f.size() != 3)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": expected 3 fields");
      Triplet t{kg.entities().id_of(f[0]), kg.predicates().id_of(f[1]),
                kg.entities().id_of(f[2])};
      if (!kg.add(t, s))
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": triplet stored twice");
    }
  }
  return kg;
}

}  // namespace kgenrich
