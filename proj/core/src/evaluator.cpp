#include "kgenrich/evaluator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kgenrich/ingest.hpp"
#include "kgenrich/random.hpp"
#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

std::string format_ratio(const std::optional<double>& p) {
  return p ? format_real(*p) : std::string("n/a");
}

bool parse_flag(std::string_view text, bool& value) {
  std::string t(trim(text));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "1" || t == "y" || t == "yes" || t == "true") {
    value = true;
    return true;
  }
  if (t == "0" || t == "n" || t == "no" || t == "false") {
    value = false;
    return true;
  }
  return false;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::size_t hit_triplets(const std::vector<Triplet>& predictions, const KnowledgeGraph& kg) {
  std::unordered_set<Triplet, TripletHash> seen;
  std::size_t hits = 0;
  for (const auto& t : predictions)
    if (seen.insert(t).second && kg.contains(t, SplitScope{Split::Test})) ++hits;
  return hits;
}

std::size_t hit_triplets(const std::vector<Prediction>& predictions, const KnowledgeGraph& kg) {
  std::vector<Triplet> triplets;
  triplets.reserve(predictions.size());
  for (const auto& p : predictions) triplets.push_back(p.triplet);
  return hit_triplets(triplets, kg);
}

TestPairIndex::TestPairIndex(const KnowledgeGraph& kg) {
  for (const auto& t : kg.triplets_in(SplitScope{Split::Test})) {
    pairs_.insert(pair_of(t, Orientation::SubjectKnown));
    pairs_.insert(pair_of(t, Orientation::ObjectKnown));
  }
}

double pair_precision(const std::vector<EntityPredicatePair>& pairs, const TestPairIndex& index) {
  if (pairs.empty()) throw std::invalid_argument("pair precision of an empty pair set");
  std::size_t covered = 0;
  for (const auto& p : pairs) covered += index.covered(p) ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(pairs.size());
}

double pair_precision(const std::vector<EntityPredicatePair>& pairs, const KnowledgeGraph& kg) {
  return pair_precision(pairs, TestPairIndex(kg));
}

std::vector<GroupPrecision> group_precision(const std::vector<EntityPredicatePair>& pairs,
                                            const std::vector<std::size_t>& group_of,
                                            const std::vector<std::string>& labels,
                                            const KnowledgeGraph& kg) {
  if (group_of.size() != pairs.size())
    throw std::invalid_argument("every pair needs a group label");
  std::vector<GroupPrecision> groups(labels.size());
  for (std::size_t g = 0; g < labels.size(); ++g) groups[g].label = labels[g];
  const TestPairIndex index(kg);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (group_of[i] >= groups.size()) throw std::out_of_range("group index out of range");
    auto& g = groups[group_of[i]];
    ++g.pairs;
    if (index.covered(pairs[i])) ++g.covered;
  }
  for (auto& g : groups)
    if (g.pairs) g.precision = static_cast<double>(g.covered) / static_cast<double>(g.pairs);
  return groups;
}

std::vector<GroupPrecision> km_precision(const std::vector<KmVerdict>& verdicts,
                                         const KnowledgeGraph& kg) {
  std::vector<EntityPredicatePair> pairs;
  std::vector<std::size_t> group_of;
  for (const auto& v : verdicts) {
    pairs.push_back(v.pair);
    group_of.push_back(v.compatible ? 0 : 1);
  }
  return group_precision(pairs, group_of, {"compatible", "incompatible"}, kg);
}

std::vector<GroupPrecision> es_precision(const EsBinning& binning, const KnowledgeGraph& kg) {
  std::vector<EntityPredicatePair> pairs;
  std::vector<std::size_t> group_of;
  for (const auto& e : binning.entries) {
    pairs.push_back(e.pair);
    group_of.push_back(e.bin);
  }
  std::vector<std::string> labels;
  for (std::size_t b = 0; b < binning.num_bins; ++b) labels.push_back(std::to_string(b));
  return group_precision(pairs, group_of, labels, kg);
}

EvalReport evaluate(const std::string& method, const std::vector<Prediction>& predictions,
                    const KnowledgeGraph& kg, Orientation orientation) {
  EvalReport r;
  r.method = method;
  r.orientation = orientation;
  r.predictions = predictions.size();
  r.hit_triplets = hit_triplets(predictions, kg);
  const auto pairs = prediction_pairs(predictions, orientation);
  r.pair_count = pairs.size();
  const TestPairIndex index(kg);
  for (const auto& p : pairs) r.covered_pairs += index.covered(p) ? 1 : 0;
  r.pair_precision = pair_precision(pairs, index);
  return r;
}

std::string format_eval_text(const EvalReport& r) {
  std::ostringstream os;
  os << "method: " << r.method << '\n'
     << "orientation: " << to_string(r.orientation) << '\n'
     << "predictions: " << r.predictions << '\n'
     << "hit triplets: " << r.hit_triplets << '\n'
     << "predicted pairs: " << r.pair_count << '\n'
     << "covered pairs: " << r.covered_pairs << '\n'
     << "pair precision: " << format_real(r.pair_precision) << '\n';
  for (const auto& g : r.groups)
    os << "group " << g.label << ": pairs=" << g.pairs << " covered=" << g.covered
       << " precision=" << format_ratio(g.precision) << '\n';
  return os.str();
}

std::string format_eval_tsv(const EvalReport& r) {
  std::ostringstream os;
  os << "key\tvalue\n"
     << "method\t" << r.method << '\n'
     << "orientation\t" << to_string(r.orientation) << '\n'
     << "predictions\t" << r.predictions << '\n'
     << "hit_triplets\t" << r.hit_triplets << '\n'
     << "pair_count\t" << r.pair_count << '\n'
     << "covered_pairs\t" << r.covered_pairs << '\n'
     << "pair_precision\t" << format_real(r.pair_precision) << '\n';
  for (const auto& g : r.groups)
    os << "group:" << g.label << '\t' << format_ratio(g.precision) << '\n';
  return os.str();
}

std::string format_bin_precision(const std::vector<GroupPrecision>& bins) {
  std::ostringstream os;
  for (std::size_t b = 0; b < bins.size(); ++b)
    os << b << '\t' << format_ratio(bins[b].precision) << '\n';
  return os.str();
}

AnnotationExport export_annotation_sample(const std::vector<EntityPredicatePair>& pairs,
                                          const KnowledgeGraph& kg, std::size_t n,
                                          std::uint64_t seed, const std::filesystem::path& path) {
  AnnotationExport out;
  std::vector<EntityPredicatePair> pool(pairs);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (n > pool.size()) {
    out.warnings.push_back("requested " + std::to_string(n) + " pairs but only " +
                           std::to_string(pool.size()) + " are available; exporting all");
    n = pool.size();
  }
  Rng rng = make_rng(seed, "annotation", 0);
  // Partial Fisher-Yates over the sorted pool.
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  out.rows.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));

  auto file = open_output(path);
  file << "# Fill `correct` and `relevant` with 1 or 0 for every row.\n"
          "# correct: the entity is the kind of thing the predicate can describe\n"
          "#   (a mountain with a date of birth is not).\n"
          "# relevant: someone looking this entity up would likely want this fact\n"
          "#   (a chemist's favourite football club usually is not).\n"
          "# Judge the pair itself; whether a value is known does not matter.\n";
  file << "entity\tpredicate\torientation\tcorrect\trelevant\n";
  for (const auto& p : out.rows)
    file << kg.entities().label(p.entity) << '\t' << kg.predicates().label(p.predicate) << '\t'
         << to_string(p.orientation) << "\t\t\n";
  if (!file) throw IoError("write failed: " + path.string());
  return out;
}

RcResult rc_ratio(const std::filesystem::path& path) {
  auto in = open_input(path);
  RcResult r;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto f = split_fields(line);
    if (!header_seen) {
      header_seen = true;
      if (f.size() >= 2 && f[0] == "entity") continue;
    }
    if (f.size() != 5)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    bool correct = false;
    bool relevant = false;
    if (!parse_flag(f[3], correct) || !parse_flag(f[4], relevant))
      throw ParseError(path.string() + ":" + std::to_string(line_no) +
                       ": correct/relevant must be filled with 1/0");
    ++r.rows;
    if (correct) {
      ++r.correct;
      if (relevant) ++r.relevant_and_correct;
    } else if (relevant) {
      ++r.relevant_not_correct;
      r.flagged_lines.push_back(line_no);
    }
  }
  if (r.correct == 0) throw std::invalid_argument("no rows annotated as correct");
  r.ratio = static_cast<double>(r.relevant_and_correct) / static_cast<double>(r.correct);
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0 || syy == 0) throw std::invalid_argument("spearman undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace kgenrich
