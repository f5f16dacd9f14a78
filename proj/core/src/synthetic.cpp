#include "kgenrich/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "kgenrich/random.hpp"
#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

constexpr const char* kResource = "http://synth.example/resource/";
constexpr const char* kOntology = "http://synth.example/ontology/";
const std::size_t kBaseLength = std::string_view(kResource).size();
static_assert(std::string_view("http://synth.example/resource/").size() ==
              std::string_view("http://synth.example/ontology/").size());

std::string type_name(std::size_t t) {
  static const char* names[] = {"Person", "Place", "Organisation", "Work",
                                "Species", "Event", "Device", "Award"};
  std::string name = names[t % 8];
  if (t >= 8) name += std::to_string(t / 8);
  return name;
}

std::string percent_encode(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string iri(std::string_view label) { return "<" + std::string(label) + ">"; }

// res:Foo / ont:bar when the label lives under the namespace, else <label>.
std::string term(std::string_view label, bool prefixed) {
  if (prefixed) {
    if (label.rfind(kResource, 0) == 0) return "res:" + std::string(label.substr(kBaseLength));
    if (label.rfind(kOntology, 0) == 0) return "ont:" + std::string(label.substr(kBaseLength));
  }
  return iri(label);
}

}  // namespace

SyntheticWorld generate_synthetic(const SyntheticConfig& c) {
  if (c.types == 0 || c.entities_per_type == 0 || c.predicates == 0 || c.blocks_per_type == 0 ||
      c.blocks_per_type > c.entities_per_type || c.max_tails == 0)
    throw std::invalid_argument("degenerate synthetic config");
  Rng rng = make_rng(c.seed, "synthetic", 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  const std::size_t per_type = c.entities_per_type;
  const std::size_t block_size = per_type / c.blocks_per_type;
  std::vector<std::string> entity_label;
  for (std::size_t t = 0; t < c.types; ++t)
    for (std::size_t i = 0; i < per_type; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "_%03zu", i);
      entity_label.push_back(kResource + type_name(t) + buf);
    }
  std::vector<std::string> predicate_label;
  std::vector<std::size_t> domain(c.predicates), range(c.predicates);
  for (std::size_t r = 0; r < c.predicates; ++r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rel%02zu", r);
    predicate_label.push_back(kOntology + std::string(buf));
    domain[r] = pick(c.types);
    range[r] = pick(c.types);
  }

  SyntheticWorld w;
  for (std::size_t r = 0; r < c.predicates; ++r) {
    std::vector<std::size_t> target(c.blocks_per_type);
    for (auto& b : target) b = pick(c.blocks_per_type);
    for (std::size_t i = 0; i < per_type; ++i) {
      if (unit(rng) >= c.participation) continue;
      const std::size_t head = domain[r] * per_type + i;
      const std::size_t block = std::min(i / block_size, c.blocks_per_type - 1);
      const std::size_t first = range[r] * per_type + target[block] * block_size;
      const std::size_t k = 1 + pick(std::min(c.max_tails, block_size));
      std::set<std::size_t> tails;
      for (std::size_t attempt = 0; tails.size() < k && attempt < 16 * k; ++attempt) {
        const std::size_t tail = first + pick(block_size);
        if (tail != head) tails.insert(tail);
      }
      for (auto tail : tails)
        w.ntriples.push_back(iri(entity_label[head]) + " " + iri(predicate_label[r]) + " " +
                             iri(entity_label[tail]) + " .");
    }
  }
  w.fact_count = w.ntriples.size();
  if (w.fact_count == 0) throw std::invalid_argument("synthetic config produced no facts");

  // Literal-valued facts, skipped on load.
  for (std::size_t e = 0; e < entity_label.size(); e += 7)
    w.ntriples.push_back(iri(entity_label[e]) + " <" + kOntology + "name> \"" +
                         entity_label[e].substr(kBaseLength) + "\"@en .");
  // Junk entities: years, list pages, a bare host, and an unqueried cluster.
  for (std::size_t i = 0; i < 20; ++i)
    w.ntriples.push_back(iri(entity_label[pick(entity_label.size())]) + " " +
                         iri(predicate_label[pick(c.predicates)]) + " <" + kResource +
                         std::to_string(1900 + i) + "> .");
  for (std::size_t i = 0; i < 10; ++i)
    w.ntriples.push_back("<" + std::string(kResource) + "List_of_things_" + std::to_string(i) +
                         "> " + iri(predicate_label[pick(c.predicates)]) + " " +
                         iri(entity_label[pick(entity_label.size())]) + " .");
  w.ntriples.push_back(iri(entity_label[0]) + " <" + kOntology +
                       "homepage> <http://synth.example> .");
  for (std::size_t i = 0; i < 30; ++i)
    w.ntriples.push_back("<" + std::string(kResource) + "Misc_" + std::to_string(i) + "> <" +
                         kOntology + "seeAlso> <" + kResource + "Misc_" +
                         std::to_string((i * 7 + 3) % 30) + "> .");

  for (std::size_t e = 0; e < entity_label.size(); ++e)
    if (unit(rng) >= c.untyped_fraction)
      w.entity_types.push_back(entity_label[e] + "\t" + type_name(e / per_type));
  for (std::size_t r = 0; r < c.predicates; ++r)
    w.domain_ranges.push_back(predicate_label[r] + "\t" + type_name(domain[r]) + "\t" +
                              type_name(range[r]));
  return w;
}

void write_synthetic(const SyntheticWorld& w, const std::filesystem::path& dir) {
  auto dump = [&](const std::vector<std::string>& lines, const char* name) {
    auto out = open_output(dir / name);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw IoError("write failed: " + (dir / name).string());
  };
  dump(w.ntriples, "kg.nt");
  dump(w.entity_types, "entity_types.tsv");
  dump(w.domain_ranges, "domain_range.tsv");
}

std::vector<std::string> synthesize_query_log(const KnowledgeGraph& kg,
                                              const QueryLogConfig& c) {
  const auto test = kg.triplets_in({Split::Test});
  if (test.empty()) throw std::invalid_argument("KG has no test split to draw queries from");
  if (kg.num_entities() == 0 || kg.num_predicates() == 0)
    throw std::invalid_argument("KG vocabulary is empty");
  Rng rng = make_rng(c.seed, "queries", 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const auto& ent = kg.entities();
  const auto& pred = kg.predicates();
  const std::string prologue = std::string("PREFIX res: <") + kResource + "> PREFIX ont: <" +
                               kOntology + "> ";

  // Facts per head, for the occasional two-pattern query.
  std::vector<std::vector<VocabId>> predicates_of(kg.num_entities());
  for (const auto& t : test) predicates_of[t.head].push_back(t.predicate);

  std::vector<std::string> log;
  for (std::size_t q = 0; q < c.queries; ++q) {
    const bool prefixed = unit(rng) < 0.5;
    std::string text = prefixed ? prologue : "";
    if (unit(rng) < c.other_form_fraction) {
      const auto& t = test[pick(test.size())];
      if (unit(rng) < 0.5)
        text += "ASK { " + term(ent.label(t.head), prefixed) + " " +
                term(pred.label(t.predicate), prefixed) + " " + term(ent.label(t.tail), prefixed) +
                " }";
      else
        text += "DESCRIBE " + term(ent.label(t.head), prefixed);
    } else {
      const bool subject_known = unit(rng) < 0.5;
      VocabId entity, predicate;
      if (unit(rng) < c.noise_fraction) {
        entity = static_cast<VocabId>(pick(kg.num_entities()));
        predicate = static_cast<VocabId>(pick(kg.num_predicates()));
      } else {
        const auto& t = test[pick(test.size())];
        entity = subject_known ? t.head : t.tail;
        predicate = t.predicate;
      }
      const std::string e = term(ent.label(entity), prefixed);
      const std::string p = term(pred.label(predicate), prefixed);
      const auto& more = predicates_of[entity];
      if (!subject_known) {
        text += "SELECT ?s WHERE { ?s " + p + " " + e + " }";
      } else if (!more.empty() && unit(rng) < 0.2) {
        text += "SELECT ?a ?b WHERE { " + e + " " + p + " ?a ; " +
                term(pred.label(more[pick(more.size())]), prefixed) + " ?b . }";
      } else {
        text += "SELECT ?o WHERE { " + e + " " + p + " ?o . }";
      }
    }
    log.push_back(unit(rng) < c.encoded_fraction ? percent_encode(text) : text);
  }
  return log;
}

}  // namespace kgenrich
