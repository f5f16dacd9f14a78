#include "kgenrich/rotate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "kgenrich/parallel.hpp"
#include "kgenrich/random.hpp"
#include "kgenrich/text_io.hpp"

namespace kgenrich {

namespace {

constexpr std::size_t kMaxNegativeResamples = 100;

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

// Accumulates coeff * d(distance)/d(params) for one triplet into `grad`.
void accumulate_distance_gradient(const RotatEModel& model, const Triplet& tr, double coeff,
                                  Gradient& grad) {
  const std::size_t d = model.dim();
  auto h = model.entity(tr.head);
  auto t = model.entity(tr.tail);
  auto theta = model.phases(tr.predicate);

  std::vector<double> a(d), b(d);
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double c = std::cos(theta[i]), s = std::sin(theta[i]);
    a[i] = h[i] * c - h[d + i] * s - t[i];
    b[i] = h[i] * s + h[d + i] * c - t[d + i];
    total += model.norm() == Norm::L1 ? std::sqrt(a[i] * a[i] + b[i] * b[i]) : a[i] * a[i] + b[i] * b[i];
  }
  if (model.norm() == Norm::L2) total = std::sqrt(total);

  auto& gh = grad.entities.try_emplace(tr.head, 2 * d, 0.0).first->second;
  auto& gt = grad.entities.try_emplace(tr.tail, 2 * d, 0.0).first->second;
  auto& gr = grad.predicates.try_emplace(tr.predicate, d, 0.0).first->second;

  for (std::size_t i = 0; i < d; ++i) {
    double denom = model.norm() == Norm::L1 ? std::sqrt(a[i] * a[i] + b[i] * b[i]) : total;
    if (denom == 0.0) continue;
    double ga = coeff * a[i] / denom;
    double gb = coeff * b[i] / denom;
    double c = std::cos(theta[i]), s = std::sin(theta[i]);
    double hre = h[i], him = h[d + i];
    gh[i] += ga * c + gb * s;
    gh[d + i] += -ga * s + gb * c;
    gt[i] -= ga;
    gt[d + i] -= gb;
    gr[i] += ga * (-hre * s - him * c) + gb * (hre * c - him * s);
  }
}

}  // namespace

const char* to_string(Norm norm) { return norm == Norm::L1 ? "L1" : "L2"; }

Norm parse_norm(std::string_view text) {
  if (text == "L1" || text == "l1") return Norm::L1;
  if (text == "L2" || text == "l2") return Norm::L2;
  throw std::invalid_argument("unknown norm: " + std::string(text));
}

void TrainConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be > 0");
  if (negatives < 1) throw std::invalid_argument("negatives per positive must be >= 1");
  if (negative_weight < 0 || !std::isfinite(negative_weight))
    throw std::invalid_argument("negative weight must be > 0 (or 0 for the default)");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
}

RotatEModel::RotatEModel(std::size_t num_entities, std::size_t num_predicates, std::size_t dim,
                         double gamma, Norm norm)
    : dim_(dim),
      gamma_(gamma),
      norm_(norm),
      entities_(num_entities * 2 * dim, 0.0),
      phases_(num_predicates * dim, 0.0) {
  if (dim == 0) throw std::invalid_argument("dim must be >= 1");
  if (!(gamma > 0)) throw std::invalid_argument("gamma must be > 0");
}

RotatEModel RotatEModel::initialized(std::size_t num_entities, std::size_t num_predicates,
                                     std::size_t dim, double gamma, Norm norm,
                                     std::uint64_t seed) {
  RotatEModel m(num_entities, num_predicates, dim, gamma, norm);
  Rng rng(seed);
  const double range = 0.5 * gamma / static_cast<double>(dim);
  std::uniform_real_distribution<double> ent(-range, range);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  for (auto& x : m.entities_) x = ent(rng);
  for (auto& x : m.phases_) x = phase(rng);
  return m;
}

double RotatEModel::distance(VocabId h, VocabId r, VocabId t) const {
  auto eh = entity(h);
  auto et = entity(t);
  auto th = phases(r);
  const std::size_t d = dim_;
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double c = std::cos(th[i]), s = std::sin(th[i]);
    double a = eh[i] * c - eh[d + i] * s - et[i];
    double b = eh[i] * s + eh[d + i] * c - et[d + i];
    total += norm_ == Norm::L1 ? std::sqrt(a * a + b * b) : a * a + b * b;
  }
  return norm_ == Norm::L1 ? total : std::sqrt(total);
}

std::vector<double> RotatEModel::rotate(VocabId h, VocabId r) const {
  auto eh = entity(h);
  auto th = phases(r);
  std::vector<double> out(2 * dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double c = std::cos(th[i]), s = std::sin(th[i]);
    out[i] = eh[i] * c - eh[dim_ + i] * s;
    out[dim_ + i] = eh[i] * s + eh[dim_ + i] * c;
  }
  return out;
}

void RotatEModel::check_compatible(const KnowledgeGraph& kg) const {
  if (num_entities() != kg.num_entities() || num_predicates() != kg.num_predicates())
    throw std::invalid_argument("model has " + std::to_string(num_entities()) + " entities and " +
                                std::to_string(num_predicates()) + " predicates, KG has " +
                                std::to_string(kg.num_entities()) + " and " +
                                std::to_string(kg.num_predicates()));
}

double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double loss(const RotatEModel& model, const Triplet& positive, std::span<const Triplet> negatives,
            const TrainConfig& config) {
  const double k = config.effective_negative_weight();
  double value = -log_sigmoid(model.score(positive));
  for (const auto& n : negatives) value -= log_sigmoid(-model.score(n)) / k;
  return value;
}

std::span<const double> Gradient::entity(VocabId id) const {
  auto it = entities.find(id);
  if (it == entities.end()) return {};
  return it->second;
}

std::span<const double> Gradient::predicate(VocabId id) const {
  auto it = predicates.find(id);
  if (it == predicates.end()) return {};
  return it->second;
}

Gradient gradients(const RotatEModel& model, const Triplet& positive,
                   std::span<const Triplet> negatives, const TrainConfig& config,
                   double* loss_out) {
  const double k = config.effective_negative_weight();
  Gradient grad;
  // dL/dd_pos = sigmoid(-s_pos); dL/dd_neg = -(1/k) sigmoid(s_neg)
  const double s_pos = model.score(positive);
  accumulate_distance_gradient(model, positive, sigmoid(-s_pos), grad);
  double value = -log_sigmoid(s_pos);
  for (const auto& n : negatives) {
    const double s_neg = model.score(n);
    accumulate_distance_gradient(model, n, -sigmoid(s_neg) / k, grad);
    value -= log_sigmoid(-s_neg) / k;
  }
  if (loss_out) *loss_out = value;
  return grad;
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config) {
  config.validate();
  std::vector<Triplet> positives = kg.triplets_in({Split::Train});
  if (positives.empty()) throw std::invalid_argument("train split is empty");
  if (kg.num_entities() == 0) throw std::invalid_argument("KG has no entities");

  TrainResult result;
  result.model = RotatEModel::initialized(kg.num_entities(), kg.num_predicates(), config.dim,
                                          config.gamma, config.norm,
                                          derive_seed(config.seed, "init"));
  RotatEModel& model = result.model;
  Rng shuffle_rng = make_rng(config.seed, "shuffle");
  Rng negative_rng = make_rng(config.seed, "negatives");
  std::uniform_int_distribution<VocabId> any_entity(0,
                                                    static_cast<VocabId>(kg.num_entities() - 1));
  std::bernoulli_distribution corrupt_head(0.5);

  const std::size_t n = config.negatives;
  std::vector<std::size_t> order(positives.size());
  std::vector<Triplet> negatives;
  std::vector<Gradient> grads;
  std::vector<double> losses;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_total = 0.0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t batch = std::min(config.batch_size, order.size() - start);
      negatives.assign(batch * n, Triplet{});
      for (std::size_t b = 0; b < batch; ++b) {
        const Triplet& pos = positives[order[start + b]];
        for (std::size_t j = 0; j < n; ++j) {
          Triplet neg = pos;
          const bool head = corrupt_head(negative_rng);
          for (std::size_t attempt = 0; attempt < kMaxNegativeResamples; ++attempt) {
            neg = pos;
            (head ? neg.head : neg.tail) = any_entity(negative_rng);
            if (!kg.contains(neg, {Split::Train})) break;
          }
          negatives[b * n + j] = neg;
        }
      }

      grads.assign(batch, Gradient{});
      losses.assign(batch, 0.0);
      parallel_for(batch, config.threads, [&](std::size_t b) {
        grads[b] = gradients(model, positives[order[start + b]],
                             std::span<const Triplet>(negatives.data() + b * n, n), config,
                             &losses[b]);
      });

      const double step = config.learning_rate / static_cast<double>(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        epoch_total += losses[b];
        for (const auto& [id, g] : grads[b].entities) {
          auto p = model.entity(id);
          for (std::size_t i = 0; i < g.size(); ++i) p[i] -= step * g[i];
        }
        for (const auto& [id, g] : grads[b].predicates) {
          auto p = model.phases(id);
          for (std::size_t i = 0; i < g.size(); ++i) p[i] -= step * g[i];
        }
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(positives.size()));
  }
  return result;
}

void save_model(const RotatEModel& model, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rotate v1\n"
      << "dim=" << model.dim() << '\n'
      << "gamma=" << format_real(model.gamma()) << '\n'
      << "norm=" << to_string(model.norm()) << '\n'
      << "entities=" << model.num_entities() << '\n'
      << "predicates=" << model.num_predicates() << '\n';
  auto write_rows = [&](const std::vector<double>& table, std::size_t width) {
    for (std::size_t i = 0; i < table.size(); i += width) {
      for (std::size_t j = 0; j < width; ++j) {
        if (j) out << ' ';
        out << format_real(table[i + j]);
      }
      out << '\n';
    }
  };
  write_rows(model.entity_table(), 2 * model.dim());
  write_rows(model.phase_table(), model.dim());
  if (!out) throw IoError("write failed: " + path.string());
}

RotatEModel load_model(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error(path.string() + ": " + why);
  };
  std::string line;
  if (!std::getline(in, line) || line != "rotate v1") throw fail("not a 'rotate v1' checkpoint");

  std::map<std::string, std::string> header;
  std::streampos rows_start = in.tellg();
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) break;
    header[line.substr(0, eq)] = line.substr(eq + 1);
    rows_start = in.tellg();
  }
  for (const char* key : {"dim", "gamma", "entities", "predicates"})
    if (!header.count(key)) throw fail(std::string("missing header field ") + key);

  std::size_t dim = 0, num_entities = 0, num_predicates = 0;
  double gamma = 0;
  Norm norm = Norm::L1;
  try {
    dim = parse_count(header["dim"]);
    gamma = parse_real(header["gamma"]);
    num_entities = parse_count(header["entities"]);
    num_predicates = parse_count(header["predicates"]);
    if (header.count("norm")) norm = parse_norm(header["norm"]);
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  if (dim == 0 || !(gamma > 0)) throw fail("invalid dim or gamma");

  RotatEModel model(num_entities, num_predicates, dim, gamma, norm);
  in.clear();
  in.seekg(rows_start);

  auto read_row = [&](std::span<double> dst, const char* what, std::size_t index) {
    if (!std::getline(in, line))
      throw fail(std::string("truncated: missing ") + what + " row " + std::to_string(index));
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t j = 0; j < dst.size(); ++j) {
      while (p < end && *p == ' ') ++p;
      auto [next, ec] = std::from_chars(p, end, dst[j]);
      if (ec != std::errc() || !std::isfinite(dst[j]))
        throw fail(std::string("bad value in ") + what + " row " + std::to_string(index));
      p = next;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) throw fail(std::string("dim mismatch in ") + what + " row " + std::to_string(index));
  };
  for (std::size_t e = 0; e < num_entities; ++e)
    read_row(model.entity(static_cast<VocabId>(e)), "entity", e);
  for (std::size_t r = 0; r < num_predicates; ++r)
    read_row(model.phases(static_cast<VocabId>(r)), "predicate", r);
  while (std::getline(in, line))
    if (!trim(line).empty()) throw fail("trailing data after predicate rows");
  return model;
}

}  // namespace kgenrich
