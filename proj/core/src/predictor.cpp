#include "kgenrich/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "kgenrich/parallel.hpp"
#include "kgenrich/random.hpp"
#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

struct Proposal {
  Triplet triplet;
  double score = 0.0;
  std::size_t pair_index = 0;
};

struct ChunkCounts {
  std::uint64_t proposals = 0;
  std::uint64_t predicate_draws = 0;
  std::uint64_t entity_draws = 0;
  std::uint64_t pair_draws = 0;
};

// Generates batches of accepted proposals. `factory()` returns a fresh
// per-chunk generator `gen(rng, counts) -> std::pair<Triplet, pair_index>`.
template <typename Factory>
class ProposalEngine {
 public:
  ProposalEngine(const RotatEModel& model, std::uint64_t seed, std::string_view purpose,
                 const SamplerOptions& options, Factory factory)
      : model_(model), seed_(seed), purpose_(purpose), options_(options), factory_(factory) {
    if (options_.chunk_size == 0 || options_.chunks_per_batch == 0)
      throw std::invalid_argument("sampler chunk size and chunks per batch must be positive");
  }

  std::vector<Proposal> next_batch(ProposalStats& stats) {
    const std::size_t chunks = options_.chunks_per_batch;
    std::vector<std::vector<Proposal>> accepted(chunks);
    std::vector<ChunkCounts> counts(chunks);
    parallel_for(chunks, options_.threads, [&](std::size_t c) {
      Rng rng = make_rng(seed_, purpose_, next_chunk_ + c);
      auto gen = factory_();
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (std::size_t i = 0; i < options_.chunk_size; ++i) {
        auto [triplet, pair_index] = gen(rng, counts[c]);
        ++counts[c].proposals;
        const double score = model_.score(triplet);
        if (unit(rng) < accept_probability(score, model_.gamma()))
          accepted[c].push_back({triplet, score, pair_index});
      }
    });
    next_chunk_ += chunks;
    ++stats.batches;
    std::vector<Proposal> merged;
    for (std::size_t c = 0; c < chunks; ++c) {
      stats.proposals += counts[c].proposals;
      stats.predicate_draws += counts[c].predicate_draws;
      stats.entity_draws += counts[c].entity_draws;
      stats.pair_draws += counts[c].pair_draws;
      merged.insert(merged.end(), accepted[c].begin(), accepted[c].end());
    }
    return merged;
  }

 private:
  const RotatEModel& model_;
  std::uint64_t seed_;
  std::string purpose_;
  SamplerOptions options_;
  Factory factory_;
  std::uint64_t next_chunk_ = 0;
};

auto rs_factory(const PredicateMarginal& marginal, std::size_t num_entities) {
  if (num_entities == 0) throw std::invalid_argument("model has no entities");
  return [&marginal, num_entities]() {
    return [predicate = marginal.distribution(),
            entity = std::uniform_int_distribution<VocabId>(
                0, static_cast<VocabId>(num_entities - 1))](Rng& rng, ChunkCounts& counts) mutable {
      Triplet t;
      t.predicate = predicate(rng);
      t.head = entity(rng);
      t.tail = entity(rng);
      counts.predicate_draws += 1;
      counts.entity_draws += 2;
      return std::pair<Triplet, std::size_t>{t, 0};
    };
  };
}

// Pulls batches until `n` new predictions are collected.
template <typename Engine, typename Emit>
void collect(Engine& engine, const KnowledgeGraph& kg, std::size_t n,
             const SamplerOptions& options, PredictionRun& run, Emit emit) {
  std::unordered_set<Triplet, TripletHash> seen;
  std::size_t empty_batches = 0;
  while (run.predictions.size() < n) {
    auto batch = engine.next_batch(run.stats);
    std::size_t added = 0;
    for (const auto& p : batch) {
      if (run.predictions.size() >= n) break;
      ++run.stats.accepted;
      if (kg.contains(p.triplet, SplitScope::train_dev())) {
        ++run.stats.known;
        continue;
      }
      if (!seen.insert(p.triplet).second) {
        ++run.stats.duplicates;
        continue;
      }
      run.predictions.push_back(emit(p));
      ++added;
    }
    empty_batches = added ? 0 : empty_batches + 1;
    if (empty_batches >= options.max_empty_batches) {
      std::ostringstream msg;
      msg << "prediction starved: no new triplet in " << empty_batches
          << " consecutive proposal batches; collected " << run.predictions.size() << " of " << n
          << " after " << run.stats.proposals << " proposals (" << run.stats.accepted
          << " accepted, " << run.stats.known << " known, " << run.stats.duplicates
          << " duplicates)";
      throw StarvationError(msg.str());
    }
  }
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::RS: return "RS";
    case Method::QG: return "QG";
    case Method::TopK: return "TopK";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "RS" || text == "rs") return Method::RS;
  if (text == "QG" || text == "qg") return Method::QG;
  if (text == "TopK" || text == "topk") return Method::TopK;
  throw std::invalid_argument("unknown method: " + std::string(text));
}

PredicateMarginal PredicateMarginal::from_train(const KnowledgeGraph& kg) {
  std::vector<double> counts(kg.num_predicates(), 0.0);
  for (std::size_t i = 0; i < kg.size(); ++i)
    if (kg.split_at(i) == Split::Train) counts[kg.triplets()[i].predicate] += 1.0;
  return PredicateMarginal(std::move(counts));
}

PredicateMarginal::PredicateMarginal(std::vector<double> weights) : probs_(std::move(weights)) {
  double total = 0.0;
  for (double w : probs_) {
    if (!(w >= 0) || !std::isfinite(w)) throw std::invalid_argument("invalid predicate weight");
    total += w;
  }
  if (!(total > 0)) throw std::invalid_argument("predicate marginal has empty support");
  for (double& p : probs_) p /= total;
}

std::vector<VocabId> PredicateMarginal::support() const {
  std::vector<VocabId> out;
  for (std::size_t r = 0; r < probs_.size(); ++r)
    if (probs_[r] > 0) out.push_back(static_cast<VocabId>(r));
  return out;
}

double accept_probability(double score, double gamma) {
  if (!std::isfinite(score)) throw std::invalid_argument("non-finite score");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  return std::exp(std::min(score, gamma) - gamma);
}

std::vector<Triplet> sample_rs_accepted(const RotatEModel& model,
                                        const PredicateMarginal& marginal, std::size_t count,
                                        std::uint64_t seed, const SamplerOptions& options) {
  ProposalEngine engine(model, seed, "proposals", options,
                        rs_factory(marginal, model.num_entities()));
  ProposalStats stats;
  std::vector<Triplet> out;
  std::size_t empty_batches = 0;
  while (out.size() < count) {
    auto batch = engine.next_batch(stats);
    for (const auto& p : batch) {
      if (out.size() >= count) break;
      out.push_back(p.triplet);
    }
    empty_batches = batch.empty() ? empty_batches + 1 : 0;
    if (empty_batches >= options.max_empty_batches)
      throw StarvationError("rejection sampler starved after " + std::to_string(stats.proposals) +
                            " proposals");
  }
  return out;
}

PredictionRun predict_rs(const RotatEModel& model, const KnowledgeGraph& kg, std::size_t n,
                         std::uint64_t seed, const SamplerOptions& options) {
  if (n == 0) throw std::invalid_argument("number of predictions must be >= 1");
  model.check_compatible(kg);
  const auto marginal = PredicateMarginal::from_train(kg);
  ProposalEngine engine(model, seed, "proposals", options,
                        rs_factory(marginal, kg.num_entities()));
  PredictionRun run;
  const auto e = static_cast<std::uint64_t>(kg.num_entities());
  run.stats.candidate_space = e * e * static_cast<std::uint64_t>(kg.num_predicates());
  collect(engine, kg, n, options, run, [](const Proposal& p) {
    return Prediction{p.triplet, p.score, Method::RS, std::nullopt};
  });
  return run;
}

PredictionRun predict_qg(const RotatEModel& model, const KnowledgeGraph& kg,
                         const QueryPairTable& pairs, std::size_t n, std::uint64_t seed,
                         const QgOptions& qg, const SamplerOptions& options) {
  if (n == 0) throw std::invalid_argument("number of predictions must be >= 1");
  model.check_compatible(kg);
  const auto entries = pairs.entries(qg.orientation);
  if (entries.empty())
    throw std::invalid_argument(std::string("pair table has no ") + to_string(qg.orientation) +
                                " pairs");
  for (const auto& e : entries) {
    if (!kg.entities().contains(e.pair.entity) || !kg.predicates().contains(e.pair.predicate))
      throw std::out_of_range("pair table references an id outside the KG");
  }
  std::vector<double> weights;
  for (const auto& e : entries)
    weights.push_back(qg.weighting == PairWeighting::Frequency ? static_cast<double>(e.frequency)
                                                               : 1.0);
  const auto num_entities = static_cast<VocabId>(kg.num_entities());
  const bool subject_known = qg.orientation == Orientation::SubjectKnown;

  auto factory = [&]() {
    return [&entries, subject_known,
            pick = std::discrete_distribution<std::size_t>(weights.begin(), weights.end()),
            entity = std::uniform_int_distribution<VocabId>(0, num_entities - 1)](
               Rng& rng, ChunkCounts& counts) mutable {
      const std::size_t index = pick(rng);
      const auto& pair = entries[index].pair;
      const VocabId missing = entity(rng);
      counts.pair_draws += 1;
      counts.entity_draws += 1;
      Triplet t = subject_known ? Triplet{pair.entity, pair.predicate, missing}
                                : Triplet{missing, pair.predicate, pair.entity};
      return std::pair<Triplet, std::size_t>{t, index};
    };
  };
  ProposalEngine engine(model, seed, "proposals", options, factory);
  PredictionRun run;
  run.stats.candidate_space = kg.num_entities();
  collect(engine, kg, n, options, run, [&](const Proposal& p) {
    return Prediction{p.triplet, p.score, Method::QG, entries[p.pair_index].pair};
  });
  return run;
}

PredictionRun predict_topk(const RotatEModel& model, const KnowledgeGraph& kg,
                           const QueryPairTable& pairs, std::size_t k, std::size_t per_pair_m,
                           Orientation orientation) {
  if (k < 1 || per_pair_m < 1) throw std::invalid_argument("k and m must be >= 1");
  model.check_compatible(kg);
  PredictionRun run;
  auto entries = pairs.entries(orientation);
  if (entries.empty())
    throw std::invalid_argument(std::string("pair table has no ") + to_string(orientation) +
                                " pairs");
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.pair < b.pair;
  });
  if (k > entries.size()) {
    run.warnings.push_back("k=" + std::to_string(k) + " exceeds the " +
                           std::to_string(entries.size()) + " available pairs; using all");
    k = entries.size();
  }
  const std::size_t num_entities = kg.num_entities();
  const std::size_t m = std::min(per_pair_m, num_entities);
  std::vector<std::pair<double, VocabId>> scored(num_entities);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& pair = entries[i].pair;
    for (std::size_t e = 0; e < num_entities; ++e) {
      auto id = static_cast<VocabId>(e);
      Triplet t = orientation == Orientation::SubjectKnown ? Triplet{pair.entity, pair.predicate, id}
                                                           : Triplet{id, pair.predicate, pair.entity};
      scored[e] = {model.score(t), id};
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(m), scored.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    for (std::size_t j = 0; j < m; ++j) {
      auto id = scored[j].second;
      Triplet t = orientation == Orientation::SubjectKnown ? Triplet{pair.entity, pair.predicate, id}
                                                           : Triplet{id, pair.predicate, pair.entity};
      ++run.stats.proposals;
      if (kg.contains(t, SplitScope::train_dev())) {
        ++run.stats.known;
        continue;
      }
      run.predictions.push_back({t, scored[j].first, Method::TopK, pair});
    }
  }
  run.stats.candidate_space = num_entities;
  return run;
}

void write_predictions(const std::vector<Prediction>& predictions, const KnowledgeGraph& kg,
                       const std::filesystem::path& path) {
  auto out = open_output(path);
  const auto& ent = kg.entities();
  const auto& pred = kg.predicates();
  for (const auto& p : predictions) {
    out << ent.label(p.triplet.head) << '\t' << pred.label(p.triplet.predicate) << '\t'
        << ent.label(p.triplet.tail) << '\t' << format_real(p.score) << '\t' << to_string(p.method)
        << '\t';
    if (p.guiding_pair)
      out << ent.label(p.guiding_pair->entity) << '\t' << pred.label(p.guiding_pair->predicate);
    else
      out << '\t';
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path,
                                         const KnowledgeGraph& kg) {
  auto in = open_input(path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto f = split_fields(line);
      if (f.size() != 7) throw std::invalid_argument("expected 7 fields");
      Prediction p;
      p.triplet = {kg.entities().id_of(f[0]), kg.predicates().id_of(f[1]),
                   kg.entities().id_of(f[2])};
      p.score = parse_real(f[3]);
      p.method = parse_method(f[4]);
      if (!f[5].empty() || !f[6].empty()) {
        EntityPredicatePair pair{kg.entities().id_of(f[5]), kg.predicates().id_of(f[6]),
                                 Orientation::SubjectKnown};
        if (pair.entity != p.triplet.head) pair.orientation = Orientation::ObjectKnown;
        p.guiding_pair = pair;
      }
      out.push_back(p);
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_proposal_stats(const ProposalStats& s) {
  std::ostringstream os;
  os << "batches=" << s.batches << '\n'
     << "proposals=" << s.proposals << '\n'
     << "accepted=" << s.accepted << '\n'
     << "rejected_known=" << s.known << '\n'
     << "rejected_duplicate=" << s.duplicates << '\n'
     << "predicate_draws=" << s.predicate_draws << '\n'
     << "entity_draws=" << s.entity_draws << '\n'
     << "pair_draws=" << s.pair_draws << '\n'
     << "candidate_space=" << s.candidate_space << '\n';
  return os.str();
}

}  // namespace kgenrich
