#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kgenrich/guidance.hpp"
#include "test_util.hpp"

using namespace kgenrich;

namespace {

KnowledgeGraph people_kg() {
  Vocabulary ev, pv;
  for (const char* e : {"MarieCurie", "Warsaw", "Mystery", "Paris"}) ev.intern(e);
  for (const char* p : {"birthPlace", "capitalOf", "seeAlso"}) pv.intern(p);
  return KnowledgeGraph(std::move(ev), std::move(pv));
}

MetadataTable people_meta() {
  MetadataTable m;
  m.entity_types[0] = {"Person", "Scientist"};
  m.entity_types[1] = {"City", "Place"};
  m.entity_types[3] = {"City", "Place"};
  m.predicate_domains[0] = {"Person"};
  m.predicate_ranges[0] = {"Place"};
  m.predicate_domains[1] = {"City"};
  m.predicate_ranges[1] = {"Country"};
  return m;
}

Prediction pred(VocabId h, VocabId r, VocabId t, double score) {
  return {{h, r, t}, score, Method::QG, EntityPredicatePair{h, r, Orientation::SubjectKnown}};
}

}  // namespace

TEST(KmClassify, DomainMismatch) {
  auto kg = people_kg();
  auto meta = people_meta();
  // MarieCurie as subject of capitalOf: Person is not a City.
  auto v = km_classify({0, 1, Orientation::SubjectKnown}, meta, kg);
  EXPECT_FALSE(v.compatible);
  EXPECT_EQ(v.reason, KmReason::DomainMismatch);
}

TEST(KmClassify, DomainAndRangeMatch) {
  auto kg = people_kg();
  auto meta = people_meta();
  auto s = km_classify({0, 0, Orientation::SubjectKnown}, meta, kg);
  EXPECT_TRUE(s.compatible);
  EXPECT_EQ(s.reason, KmReason::DomainMatch);
  // Warsaw as object of birthPlace is checked against the range.
  auto o = km_classify({1, 0, Orientation::ObjectKnown}, meta, kg);
  EXPECT_TRUE(o.compatible);
  // Warsaw as subject of birthPlace is checked against the domain.
  EXPECT_FALSE(km_classify({1, 0, Orientation::SubjectKnown}, meta, kg).compatible);
}

TEST(KmClassify, MissingMetadataReasons) {
  auto kg = people_kg();
  auto meta = people_meta();
  EXPECT_EQ(km_classify({2, 0, Orientation::SubjectKnown}, meta, kg).reason,
            KmReason::MissingEntityType);
  EXPECT_EQ(km_classify({0, 2, Orientation::SubjectKnown}, meta, kg).reason,
            KmReason::MissingPredicateConstraint);
  auto both = km_classify({2, 2, Orientation::SubjectKnown}, meta, kg);
  EXPECT_EQ(both.reason, KmReason::MissingBoth);
  EXPECT_FALSE(both.compatible);
  EXPECT_THROW(km_classify({9, 0, Orientation::SubjectKnown}, meta, kg), std::out_of_range);
}

TEST(KmReason, NamesRoundTrip) {
  for (auto r : {KmReason::DomainMatch, KmReason::DomainMismatch, KmReason::MissingEntityType,
                 KmReason::MissingPredicateConstraint, KmReason::MissingBoth})
    EXPECT_EQ(parse_km_reason(to_string(r)), r);
}

TEST(PredictionPairs, DistinctInFirstSeenOrder) {
  std::vector<Prediction> p{pred(3, 1, 0, 1), pred(0, 0, 1, 1), pred(3, 1, 2, 1), pred(0, 0, 3, 1)};
  auto pairs = prediction_pairs(p, Orientation::SubjectKnown);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].entity, 3u);
  EXPECT_EQ(pairs[1].entity, 0u);
}

TEST(KmPartition, FileRoundTrip) {
  auto kg = people_kg();
  auto meta = people_meta();
  std::vector<EntityPredicatePair> pairs{{0, 0, Orientation::SubjectKnown},
                                         {0, 1, Orientation::SubjectKnown},
                                         {2, 2, Orientation::SubjectKnown}};
  auto verdicts = km_partition(pairs, meta, kg);
  testutil::TempDir dir("km");
  write_km(verdicts, kg, dir / "km.tsv");
  auto back = read_km(dir / "km.tsv", kg, Orientation::SubjectKnown);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].pair, verdicts[i].pair);
    EXPECT_EQ(back[i].compatible, verdicts[i].compatible);
    EXPECT_EQ(back[i].reason, verdicts[i].reason);
  }
}

TEST(EsBin, MaxScorePerPair) {
  std::vector<Prediction> p{pred(0, 0, 1, 3), pred(0, 0, 2, 7), pred(0, 0, 3, 5)};
  auto b = es_bin(p, Orientation::SubjectKnown);
  ASSERT_EQ(b.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(b.entries[0].max_score, 7.0);
}

TEST(EsBin, HundredPairsFiftyBinsOfTwo) {
  std::vector<Prediction> p;
  for (VocabId e = 0; e < 100; ++e) p.push_back(pred(e, 0, 0, static_cast<double>(e)));
  auto b = es_bin(p, Orientation::SubjectKnown);
  EXPECT_EQ(b.num_bins, 50u);
  auto sizes = b.bin_sizes();
  ASSERT_EQ(sizes.size(), 50u);
  for (auto s : sizes) EXPECT_EQ(s, 2u);
  EXPECT_DOUBLE_EQ(b.entries.front().max_score, 99.0);
  EXPECT_EQ(b.entries.front().bin, 0u);
  EXPECT_EQ(b.entries.back().bin, 49u);
  EXPECT_TRUE(b.warnings.empty());
}

TEST(EsBin, RemainderGoesToLeadingBins) {
  std::vector<Prediction> p;
  for (VocabId e = 0; e < 103; ++e) p.push_back(pred(e, 0, 0, static_cast<double>(e)));
  auto sizes = es_bin(p, Orientation::SubjectKnown).bin_sizes();
  ASSERT_EQ(sizes.size(), 50u);
  EXPECT_EQ(sizes[0], 3u);
  EXPECT_EQ(sizes[2], 3u);
  EXPECT_EQ(sizes[3], 2u);
  EXPECT_EQ(sizes[49], 2u);
}

TEST(EsBin, InvariantsOnRandomInput) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> s(-5, 5);
  std::uniform_int_distribution<VocabId> id(0, 40);
  std::vector<Prediction> p;
  for (int i = 0; i < 500; ++i) p.push_back(pred(id(rng), id(rng) % 4, 0, s(rng)));
  auto b = es_bin(p, Orientation::SubjectKnown);
  auto sizes = b.bin_sizes();
  EXPECT_LE(*std::max_element(sizes.begin(), sizes.end()) -
                *std::min_element(sizes.begin(), sizes.end()),
            1u);
  EXPECT_TRUE(std::is_sorted(sizes.rbegin(), sizes.rend()));
  for (std::size_t i = 1; i < b.entries.size(); ++i) {
    EXPECT_GE(b.entries[i - 1].max_score, b.entries[i].max_score);
    EXPECT_LE(b.entries[i - 1].bin, b.entries[i].bin);
  }
  EXPECT_EQ(b.entries.size(), prediction_pairs(p, Orientation::SubjectKnown).size());
}

TEST(EsBin, TiesOrderedByIdsDeterministically) {
  std::vector<Prediction> p{pred(1, 0, 0, 2), pred(5, 0, 0, 2), pred(3, 1, 0, 2)};
  auto a = es_bin(p, Orientation::SubjectKnown);
  std::reverse(p.begin(), p.end());
  auto b = es_bin(p, Orientation::SubjectKnown);
  ASSERT_EQ(a.entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.entries[i].pair, b.entries[i].pair);
  EXPECT_EQ(a.entries[0].pair.predicate, 1u);
  EXPECT_EQ(a.entries[1].pair.entity, 5u);
  EXPECT_EQ(a.entries[2].pair.entity, 1u);
}

TEST(EsBin, FewPairsGetSingletonBinsAndWarning) {
  std::vector<Prediction> p{pred(0, 0, 0, 1), pred(1, 0, 0, 2), pred(2, 0, 0, 3)};
  auto b = es_bin(p, Orientation::SubjectKnown);
  EXPECT_EQ(b.num_bins, 3u);
  EXPECT_FALSE(b.warnings.empty());
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(b.entries[i].bin, i);
}

TEST(EsBin, FileRoundTrip) {
  auto kg = testutil::make_kg(60, 2);
  std::vector<Prediction> p;
  for (VocabId e = 0; e < 60; ++e) p.push_back(pred(e, e % 2, 0, 0.1 * e));
  auto b = es_bin(p, Orientation::SubjectKnown);
  testutil::TempDir dir("es");
  write_es(b, kg, dir / "es.tsv");
  auto back = read_es(dir / "es.tsv", kg, Orientation::SubjectKnown);
  ASSERT_EQ(back.entries.size(), b.entries.size());
  EXPECT_EQ(back.num_bins, b.num_bins);
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    EXPECT_EQ(back.entries[i].pair, b.entries[i].pair);
    EXPECT_EQ(back.entries[i].bin, b.entries[i].bin);
    EXPECT_NEAR(back.entries[i].max_score, b.entries[i].max_score, 1e-12);
  }
}
