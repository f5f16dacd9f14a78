#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "kgenrich/predictor.hpp"
#include "test_util.hpp"

using namespace kgenrich;

namespace {

RotatEModel small_model(std::size_t entities, std::size_t predicates, std::size_t dim,
                        double gamma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-0.5, 0.5), phase(-std::numbers::pi, std::numbers::pi);
  RotatEModel m(entities, predicates, dim, gamma);
  for (VocabId e = 0; e < entities; ++e)
    for (auto& x : m.entity(e)) x = coord(rng);
  for (VocabId r = 0; r < predicates; ++r)
    for (auto& x : m.phases(r)) x = phase(rng);
  return m;
}

struct Fixture {
  KnowledgeGraph kg = testutil::make_kg(20, 3);
  RotatEModel model = small_model(20, 3, 2, 1.0, 5);

  Fixture() {
    for (VocabId i = 0; i < 15; ++i) {
      kg.add({i, i % 3, static_cast<VocabId>((i + 1) % 20)}, Split::Train);
      kg.add({i, (i + 1) % 3, static_cast<VocabId>((i + 5) % 20)}, Split::Dev);
      kg.add({i, (i + 2) % 3, static_cast<VocabId>((i + 9) % 20)}, Split::Test);
    }
  }
};

}  // namespace

TEST(AcceptProbability, Examples) {
  EXPECT_DOUBLE_EQ(accept_probability(12.0, 12.0), 1.0);
  EXPECT_NEAR(accept_probability(12.0 - std::log(4.0), 12.0), 0.25, 1e-12);
  EXPECT_NEAR(accept_probability(-38.0, 12.0), std::exp(-50.0), 1e-30);
  EXPECT_DOUBLE_EQ(accept_probability(20.0, 12.0), 1.0);
  EXPECT_THROW(accept_probability(std::nan(""), 12.0), std::invalid_argument);
  EXPECT_THROW(accept_probability(1.0, 0.0), std::invalid_argument);
}

TEST(PredicateMarginal, FromTrainSumsToOne) {
  Fixture f;
  auto m = PredicateMarginal::from_train(f.kg);
  double sum = 0;
  for (double p : m.probabilities()) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_NEAR(m.probability(0), 5.0 / 15.0, 1e-12);
  EXPECT_EQ(m.probability(99), 0.0);
}

TEST(PredicateMarginal, RejectsBadWeights) {
  EXPECT_THROW(PredicateMarginal({0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(PredicateMarginal({1.0, -1.0}), std::invalid_argument);
  EXPECT_THROW(PredicateMarginal({}), std::invalid_argument);
}

TEST(MethodNames, RoundTrip) {
  for (Method m : {Method::RS, Method::QG, Method::TopK}) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("qg"), Method::QG);
  EXPECT_THROW(parse_method("beam"), std::invalid_argument);
}

TEST(PredictRs, ExactlyNDistinctUnknownTriplets) {
  Fixture f;
  auto run = predict_rs(f.model, f.kg, 200, 3);
  ASSERT_EQ(run.predictions.size(), 200u);
  std::set<Triplet> distinct;
  for (const auto& p : run.predictions) {
    distinct.insert(p.triplet);
    EXPECT_FALSE(f.kg.contains(p.triplet, SplitScope::train_dev()));
    EXPECT_EQ(p.method, Method::RS);
    EXPECT_FALSE(p.guiding_pair.has_value());
    EXPECT_NEAR(p.score, f.model.score(p.triplet), 1e-12);
  }
  EXPECT_EQ(distinct.size(), 200u);
}

TEST(PredictRs, SingleAndZero) {
  Fixture f;
  EXPECT_EQ(predict_rs(f.model, f.kg, 1, 3).predictions.size(), 1u);
  EXPECT_THROW(predict_rs(f.model, f.kg, 0, 3), std::invalid_argument);
}

TEST(PredictRs, SeedDeterminesOutputNotThreads) {
  Fixture f;
  SamplerOptions one, eight;
  one.chunk_size = 64;
  eight.chunk_size = 64;
  eight.threads = 8;
  auto a = predict_rs(f.model, f.kg, 150, 9, one);
  auto b = predict_rs(f.model, f.kg, 150, 9, eight);
  auto c = predict_rs(f.model, f.kg, 150, 10, one);
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.predictions.size(); ++i) {
    EXPECT_EQ(a.predictions[i].triplet, b.predictions[i].triplet);
    differs |= !(a.predictions[i].triplet == c.predictions[i].triplet);
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(format_proposal_stats(a.stats), format_proposal_stats(b.stats));
}

TEST(PredictRs, StructuralStats) {
  Fixture f;
  auto run = predict_rs(f.model, f.kg, 50, 1);
  EXPECT_EQ(run.stats.candidate_space, 20u * 20u * 3u);
  EXPECT_EQ(run.stats.predicate_draws, run.stats.proposals);
  EXPECT_EQ(run.stats.entity_draws, 2 * run.stats.proposals);
  EXPECT_EQ(run.stats.pair_draws, 0u);
  EXPECT_EQ(run.stats.accepted, run.predictions.size() + run.stats.known + run.stats.duplicates);
}

TEST(PredictRs, StarvesWhenEverythingIsKnown) {
  auto kg = testutil::make_kg(2, 1);
  for (VocabId h = 0; h < 2; ++h)
    for (VocabId t = 0; t < 2; ++t) kg.add({h, 0, t});
  auto model = small_model(2, 1, 2, 1.0, 1);
  SamplerOptions opt;
  opt.chunk_size = 16;
  opt.max_empty_batches = 3;
  EXPECT_THROW(predict_rs(model, kg, 1, 1, opt), StarvationError);
}

TEST(PredictQg, KeepsTheGuidingPair) {
  Fixture f;
  QueryPairTable pairs;
  pairs.add({2, 1, Orientation::SubjectKnown}, 4);
  pairs.add({7, 0, Orientation::SubjectKnown}, 1);
  pairs.add({3, 2, Orientation::ObjectKnown}, 9);  // other orientation, ignored
  auto run = predict_qg(f.model, f.kg, pairs, 30, 4);
  ASSERT_EQ(run.predictions.size(), 30u);
  std::set<Triplet> distinct;
  for (const auto& p : run.predictions) {
    ASSERT_TRUE(p.guiding_pair.has_value());
    EXPECT_EQ(p.guiding_pair->orientation, Orientation::SubjectKnown);
    EXPECT_EQ(p.triplet.head, p.guiding_pair->entity);
    EXPECT_EQ(p.triplet.predicate, p.guiding_pair->predicate);
    EXPECT_TRUE(pairs.contains(*p.guiding_pair));
    EXPECT_FALSE(f.kg.contains(p.triplet, SplitScope::train_dev()));
    distinct.insert(p.triplet);
  }
  EXPECT_EQ(distinct.size(), 30u);
}

TEST(PredictQg, ObjectKnownFixesTail) {
  Fixture f;
  QueryPairTable pairs;
  pairs.add({5, 2, Orientation::ObjectKnown});
  QgOptions qg;
  qg.orientation = Orientation::ObjectKnown;
  auto run = predict_qg(f.model, f.kg, pairs, 3, 8, qg);
  ASSERT_EQ(run.predictions.size(), 3u);
  std::set<VocabId> heads;
  for (const auto& p : run.predictions) {
    EXPECT_EQ(p.triplet.tail, 5u);
    EXPECT_EQ(p.triplet.predicate, 2u);
    heads.insert(p.triplet.head);
  }
  EXPECT_EQ(heads.size(), 3u);
}

TEST(PredictQg, StructuralStats) {
  Fixture f;
  QueryPairTable pairs;
  pairs.add({1, 0, Orientation::SubjectKnown});
  pairs.add({4, 1, Orientation::SubjectKnown});
  auto run = predict_qg(f.model, f.kg, pairs, 20, 2);
  EXPECT_EQ(run.stats.predicate_draws, 0u);
  EXPECT_EQ(run.stats.entity_draws, run.stats.proposals);
  EXPECT_EQ(run.stats.pair_draws, run.stats.proposals);
  EXPECT_EQ(run.stats.candidate_space, 20u);
}

TEST(PredictQg, RejectsUnusableTables) {
  Fixture f;
  QueryPairTable empty;
  EXPECT_THROW(predict_qg(f.model, f.kg, empty, 5, 1), std::invalid_argument);
  QueryPairTable outside;
  outside.add({99, 0, Orientation::SubjectKnown});
  EXPECT_THROW(predict_qg(f.model, f.kg, outside, 5, 1), std::out_of_range);
}

TEST(PredictQg, ThreadCountDoesNotMatter) {
  Fixture f;
  QueryPairTable pairs;
  for (VocabId e = 0; e < 6; ++e) pairs.add({e, e % 3, Orientation::SubjectKnown}, e + 1);
  QgOptions qg;
  qg.weighting = PairWeighting::Frequency;
  SamplerOptions one, many;
  one.chunk_size = many.chunk_size = 32;
  many.threads = 8;
  auto a = predict_qg(f.model, f.kg, pairs, 40, 6, qg, one);
  auto b = predict_qg(f.model, f.kg, pairs, 40, 6, qg, many);
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  for (std::size_t i = 0; i < a.predictions.size(); ++i)
    EXPECT_EQ(a.predictions[i].triplet, b.predictions[i].triplet);
}

TEST(PredictTopK, FrequencyTieGoesToSmallerPair) {
  auto kg = testutil::make_kg(10, 3);
  auto model = small_model(10, 3, 2, 1.0, 2);
  QueryPairTable pairs;
  // A:5, B:2, C:2 with B < C in (predicate, entity) order.
  pairs.add({4, 0, Orientation::SubjectKnown}, 5);
  pairs.add({1, 1, Orientation::SubjectKnown}, 2);
  pairs.add({0, 2, Orientation::SubjectKnown}, 2);
  auto run = predict_topk(model, kg, pairs, 2, 1);
  ASSERT_EQ(run.predictions.size(), 2u);
  EXPECT_EQ(*run.predictions[0].guiding_pair, (EntityPredicatePair{4, 0, Orientation::SubjectKnown}));
  EXPECT_EQ(*run.predictions[1].guiding_pair, (EntityPredicatePair{1, 1, Orientation::SubjectKnown}));
}

TEST(PredictTopK, MOneIsTheArgmax) {
  auto kg = testutil::make_kg(10, 2);
  auto model = small_model(10, 2, 3, 1.0, 3);
  QueryPairTable pairs;
  pairs.add({3, 1, Orientation::SubjectKnown});
  auto run = predict_topk(model, kg, pairs, 1, 1);
  ASSERT_EQ(run.predictions.size(), 1u);
  double best = -1e300;
  VocabId arg = 0;
  for (VocabId t = 0; t < 10; ++t)
    if (model.score(3, 1, t) > best) best = model.score(3, 1, t), arg = t;
  EXPECT_EQ(run.predictions[0].triplet.tail, arg);
}

TEST(PredictTopK, SizeIsKTimesMMinusKnown) {
  Fixture f;
  QueryPairTable pairs;
  for (VocabId e = 0; e < 5; ++e) pairs.add({e, e % 3, Orientation::SubjectKnown}, 10 - e);
  auto run = predict_topk(f.model, f.kg, pairs, 3, 20);
  EXPECT_EQ(run.predictions.size() + run.stats.known, 3u * 20u);
  for (const auto& p : run.predictions) EXPECT_FALSE(f.kg.contains(p.triplet, SplitScope::train_dev()));
  EXPECT_GT(run.stats.known, 0u);
  // Clamped k with a warning.
  auto clamped = predict_topk(f.model, f.kg, pairs, 50, 1);
  EXPECT_FALSE(clamped.warnings.empty());
  EXPECT_THROW(predict_topk(f.model, f.kg, pairs, 0, 1), std::invalid_argument);
}

TEST(PredictionsFile, RoundTrip) {
  Fixture f;
  testutil::TempDir dir("pred");
  QueryPairTable pairs;
  pairs.add({2, 1, Orientation::SubjectKnown});
  pairs.add({6, 0, Orientation::ObjectKnown});
  auto rs = predict_rs(f.model, f.kg, 10, 1).predictions;
  auto qg = predict_qg(f.model, f.kg, pairs, 5, 1).predictions;
  QgOptions object;
  object.orientation = Orientation::ObjectKnown;
  auto qo = predict_qg(f.model, f.kg, pairs, 5, 1, object).predictions;
  std::vector<Prediction> all = rs;
  all.insert(all.end(), qg.begin(), qg.end());
  all.insert(all.end(), qo.begin(), qo.end());
  write_predictions(all, f.kg, dir / "p.tsv");
  auto back = read_predictions(dir / "p.tsv", f.kg);
  ASSERT_EQ(back.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(back[i].triplet, all[i].triplet);
    EXPECT_EQ(back[i].method, all[i].method);
    EXPECT_EQ(back[i].guiding_pair, all[i].guiding_pair);
    EXPECT_NEAR(back[i].score, all[i].score, 1e-12);
  }
}
