#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "kgenrich/ingest.hpp"
#include "kgenrich/query_log.hpp"
#include "kgenrich/synthetic.hpp"
#include "test_util.hpp"

using namespace kgenrich;

namespace {

KnowledgeGraph build(const SyntheticWorld& w, std::uint64_t seed) {
  std::string text;
  for (const auto& l : w.ntriples) text += l + "\n";
  std::istringstream in(text);
  auto raw = load_ntriples(in);
  SanitizeRules rules;
  rules.require_query_relevance = false;
  return split(sanitize(raw, {}, rules).kg, {}, seed);
}

}  // namespace

TEST(Synthetic, SameSeedSameWorld) {
  SyntheticConfig cfg;
  cfg.types = 3;
  cfg.entities_per_type = 20;
  cfg.seed = 4;
  auto a = generate_synthetic(cfg);
  auto b = generate_synthetic(cfg);
  EXPECT_EQ(a.ntriples, b.ntriples);
  EXPECT_EQ(a.entity_types, b.entity_types);
  cfg.seed = 5;
  EXPECT_NE(generate_synthetic(cfg).ntriples, a.ntriples);
}

TEST(Synthetic, DefaultWorldSize) {
  auto w = generate_synthetic({});
  EXPECT_GT(w.fact_count, 4000u);
  EXPECT_LT(w.fact_count, 6500u);
  auto kg = build(w, 1);
  EXPECT_GE(kg.num_entities(), 450u);
  EXPECT_LE(kg.num_entities(), 560u);
  EXPECT_EQ(kg.num_predicates(), 11u);  // plus the seeAlso junk cluster
  EXPECT_EQ(w.domain_ranges.size(), 10u);
}

TEST(Synthetic, JunkIsRemovedBySanitization) {
  SyntheticConfig cfg;
  cfg.types = 2;
  cfg.entities_per_type = 15;
  auto w = generate_synthetic(cfg);
  std::string text;
  for (const auto& l : w.ntriples) text += l + "\n";
  std::istringstream in(text);
  auto raw = load_ntriples(in);
  EXPECT_GT(raw.report.literals, 0u);
  SanitizeRules rules;
  rules.require_query_relevance = false;
  auto result = sanitize(raw, {}, rules);
  EXPECT_GT(result.report.removed_url_number, 0u);
  EXPECT_GT(result.report.removed_list, 0u);
}

TEST(Synthetic, QueryLogTargetsTestPairs) {
  SyntheticConfig cfg;
  cfg.types = 3;
  cfg.entities_per_type = 30;
  auto kg = build(generate_synthetic(cfg), 2);
  QueryLogConfig qc;
  qc.queries = 600;
  qc.seed = 3;
  auto log = synthesize_query_log(kg, qc);
  EXPECT_EQ(log.size(), 600u);
  EXPECT_EQ(log, synthesize_query_log(kg, qc));

  std::string text;
  for (const auto& l : log) text += l + "\n";
  std::istringstream in(text);
  auto mined = mine_log(in);
  EXPECT_EQ(mined.stats.total_queries, 600u);
  EXPECT_EQ(mined.stats.unextractable, 0u);
  LogStatistics stats = mined.stats;
  auto table = resolve_pairs(mined, kg, stats);
  std::set<EntityPredicatePair> test_pairs;
  for (auto o : {Orientation::SubjectKnown, Orientation::ObjectKnown})
    for (const auto& p : pairs_of(kg, SplitScope{Split::Test}, o)) test_pairs.insert(p);
  std::uint64_t on_test = 0, total = 0;
  for (const auto& e : table.entries()) {
    total += e.frequency;
    if (test_pairs.count(e.pair)) on_test += e.frequency;
  }
  ASSERT_GT(total, 0u);
  EXPECT_GT(static_cast<double>(on_test) / static_cast<double>(total), 0.7);
}
