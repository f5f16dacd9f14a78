#include "kgenrich/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "kgenrich/evaluator.hpp"
#include "kgenrich/guidance.hpp"
#include "kgenrich/ingest.hpp"
#include "kgenrich/predictor.hpp"
#include "kgenrich/query_log.hpp"
#include "kgenrich/random.hpp"
#include "kgenrich/rotate.hpp"
#include "kgenrich/synthetic.hpp"
#include "kgenrich/text_io.hpp"

namespace fs = std::filesystem;

namespace kgenrich {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = ".";
  unsigned threads = 1;
  std::string config;
  std::optional<std::uint64_t> seed;
};

// Options that never change outputs.
bool digest_excluded(const std::string& name) {
  return name == "threads" || name == "config" || name == "out" || name == "help";
}

std::map<std::string, std::string> effective_config(const CLI::App& app) {
  std::map<std::string, std::string> cfg;
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (digest_excluded(name)) continue;
    std::string value;
    if (opt->get_expected_min() == 0) {
      value = opt->count() ? "true" : "false";
    } else if (opt->count()) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    cfg[name] = value;
  }
  return cfg;
}

std::string config_digest(const CLI::App& app) {
  std::string text;
  for (const auto& [k, v] : effective_config(app)) text += k + "=" + v + "\n";
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(text));
  return buf;
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  std::map<std::string, std::string> cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    cfg[std::string(trim(t.substr(0, eq)))] = std::string(trim(t.substr(eq + 1)));
  }
  return cfg;
}

// Appends config entries as flags unless the command line already sets them.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  for (const auto& [key, value] : read_config(path)) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
    if (given || value == "false") continue;
    args.push_back(flag);
    if (value != "true") args.push_back(value);
  }
  return args;
}

void require_file(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) throw UsageError("missing " + path.string() + "; " + hint);
}

void require_input(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw UsageError(std::string(what) + " not found: " + path);
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint64_t need_seed(const Common& c) {
  if (!c.seed) throw UsageError("--seed is required");
  return *c.seed;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

KnowledgeGraph load_workspace_kg(const Common& c) {
  const fs::path dir = fs::path(c.out) / "kg";
  require_file(dir / "train.tsv", "run `kgenrich ingest` first");
  return load_kg(dir);
}

struct Report {
  std::ostringstream text;
  Report(const char* command, const CLI::App& app) {
    text << "command=" << command << '\n' << "config_digest=" << config_digest(app) << '\n';
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Query-guided knowledge graph completion"};
  app.name("kgenrich");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;
  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->option_defaults()->always_capture_default();
    sub->add_option("--out", common.out, "Workspace directory");
    sub->add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", common.config, "key=value file; flags win");
    if (seeded) sub->add_option("--seed", common.seed, "Root seed");
  };

  // synth
  SyntheticConfig synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic KG with type metadata");
  add_common(synth_cmd, true);
  synth_cmd->add_option("--types", synth.types);
  synth_cmd->add_option("--entities-per-type", synth.entities_per_type);
  synth_cmd->add_option("--blocks-per-type", synth.blocks_per_type);
  synth_cmd->add_option("--predicates", synth.predicates);
  synth_cmd->add_option("--participation", synth.participation);
  synth_cmd->add_option("--max-tails", synth.max_tails);
  synth_cmd->add_option("--untyped-fraction", synth.untyped_fraction);

  QueryLogConfig qlog;
  std::string log_out = "queries.log";
  auto* synth_log_cmd =
      app.add_subcommand("synth-log", "Generate a query log over the workspace's test split");
  add_common(synth_log_cmd, true);
  synth_log_cmd->add_option("--queries", qlog.queries);
  synth_log_cmd->add_option("--noise-fraction", qlog.noise_fraction);
  synth_log_cmd->add_option("--other-form-fraction", qlog.other_form_fraction);
  synth_log_cmd->add_option("--encoded-fraction", qlog.encoded_fraction);
  synth_log_cmd->add_option("--file", log_out, "Output name inside the workspace");

  // ingest
  std::string kg_path, log_path, list_prefix = "List_of";
  SplitRatios ratios;
  bool strict = false, no_decode = false, keep_url_number = false, keep_lists = false,
       keep_irrelevant = false;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load, sanitize and split a KG");
  add_common(ingest_cmd, true);
  ingest_cmd->add_option("--kg", kg_path, "N-Triples (.nt) or TSV triplets")->required();
  ingest_cmd->add_option("--log", log_path, "Query log; without it no query-relevance filter");
  ingest_cmd->add_option("--train-ratio", ratios.train);
  ingest_cmd->add_option("--dev-ratio", ratios.dev);
  ingest_cmd->add_option("--test-ratio", ratios.test);
  ingest_cmd->add_option("--list-prefix", list_prefix);
  ingest_cmd->add_flag("--strict", strict, "Fail on the first malformed line");
  ingest_cmd->add_flag("--no-decode", no_decode, "Log lines are not percent-encoded");
  ingest_cmd->add_flag("--keep-url-number", keep_url_number);
  ingest_cmd->add_flag("--keep-lists", keep_lists);
  ingest_cmd->add_flag("--keep-query-irrelevant", keep_irrelevant);

  // mine
  auto* mine_cmd = app.add_subcommand("mine", "Mine entity-predicate pairs from a query log");
  add_common(mine_cmd, false);
  mine_cmd->add_option("--log", log_path)->required();
  mine_cmd->add_flag("--no-decode", no_decode);

  // train
  TrainConfig tc;
  std::string norm = "L1";
  auto* train_cmd = app.add_subcommand("train", "Train RotatE on the train split");
  add_common(train_cmd, true);
  train_cmd->add_option("--dim", tc.dim);
  train_cmd->add_option("--gamma", tc.gamma);
  train_cmd->add_option("--negatives", tc.negatives);
  train_cmd->add_option("--negative-weight", tc.negative_weight, "k; 0 means k = negatives");
  train_cmd->add_option("--lr", tc.learning_rate);
  train_cmd->add_option("--epochs", tc.epochs);
  train_cmd->add_option("--batch-size", tc.batch_size);
  train_cmd->add_option("--norm", norm)->check(CLI::IsMember({"L1", "L2"}));

  // predict
  std::string method = "rs", orientation = "SubjectKnown", weighting = "uniform";
  std::size_t n = 1000, top_k = 100, top_m = 10;
  SamplerOptions sampler;
  auto* predict_cmd = app.add_subcommand("predict", "Predict missing triplets");
  add_common(predict_cmd, true);
  predict_cmd->add_option("--method", method)
      ->check(CLI::IsMember({"rs", "qg", "topk"}, CLI::ignore_case))
      ->required();
  predict_cmd->add_option("--n", n, "Number of predictions (rs, qg)");
  predict_cmd->add_option("--orientation", orientation);
  predict_cmd->add_option("--weighting", weighting)->check(CLI::IsMember({"uniform", "frequency"}));
  predict_cmd->add_option("--k", top_k, "Query pairs used by topk");
  predict_cmd->add_option("--m", top_m, "Entities per pair for topk");
  predict_cmd->add_option("--chunk-size", sampler.chunk_size);
  predict_cmd->add_option("--max-empty-batches", sampler.max_empty_batches);

  // guide
  bool km = false, es = false;
  std::string entity_types, domain_range;
  auto* guide_cmd = app.add_subcommand("guide", "KM or ES guidance over predicted pairs");
  add_common(guide_cmd, false);
  guide_cmd->add_flag("--km", km);
  guide_cmd->add_flag("--es", es);
  guide_cmd->add_option("--method", method)->check(CLI::IsMember({"rs", "qg", "topk"}));
  guide_cmd->add_option("--orientation", orientation);
  guide_cmd->add_option("--entity-types", entity_types);
  guide_cmd->add_option("--domain-range", domain_range);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate predictions against the test split");
  add_common(eval_cmd, false);
  eval_cmd->add_option("--method", method)->check(CLI::IsMember({"rs", "qg", "topk"}))->required();
  eval_cmd->add_option("--orientation", orientation);
  eval_cmd->add_flag("--km", km, "Add KM group precision");
  eval_cmd->add_flag("--es", es, "Add ES bin precision");

  // export
  std::size_t sample_n = 200;
  auto* export_cmd = app.add_subcommand("export", "Export an annotation sample");
  add_common(export_cmd, true);
  export_cmd->add_option("--method", method)->check(CLI::IsMember({"rs", "qg", "topk"}))->required();
  export_cmd->add_option("--orientation", orientation);
  export_cmd->add_option("--n", sample_n);

  // rc
  std::string annotated;
  auto* rc_cmd = app.add_subcommand("rc", "Relevant share of correct pairs in an annotated sample");
  add_common(rc_cmd, false);
  rc_cmd->add_option("--file", annotated)->required();

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    args = apply_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const fs::path ws(common.out);
  method = lower(method);
  try {
    if (synth_cmd->parsed()) {
      synth.seed = need_seed(common);
      const auto world = generate_synthetic(synth);
      write_synthetic(world, ws);
      Report r("synth", *synth_cmd);
      r.text << "facts=" << world.fact_count << '\n'
             << "ntriples_lines=" << world.ntriples.size() << '\n';
      write_text(ws / "synth_report.txt", r.text.str());
      out << "wrote synthetic world (" << world.fact_count << " facts) to " << ws.string() << '\n';
    } else if (synth_log_cmd->parsed()) {
      qlog.seed = need_seed(common);
      const auto kg = load_workspace_kg(common);
      const auto lines = synthesize_query_log(kg, qlog);
      std::string text;
      for (const auto& l : lines) text += l + '\n';
      write_text(ws / log_out, text);
      out << "wrote " << lines.size() << " queries to " << (ws / log_out).string() << '\n';
    } else if (ingest_cmd->parsed()) {
      const auto seed = need_seed(common);
      require_input(kg_path, "KG file");
      if (!log_path.empty()) require_input(log_path, "query log");
      LoadOptions lo;
      lo.strict = strict;
      const auto raw = load_graph(kg_path, lo);
      MinedPairs mined;
      if (!log_path.empty()) mined = mine_log(fs::path(log_path), !no_decode);
      SanitizeRules rules;
      rules.drop_url_or_number = !keep_url_number;
      rules.drop_lists = !keep_lists;
      rules.require_query_relevance = !keep_irrelevant && !log_path.empty();
      rules.list_prefix = list_prefix;
      auto clean = sanitize(raw, QueryTerms::from(mined), rules);
      const auto kg = split(clean.kg, ratios, seed);
      save_kg(kg, ws / "kg");
      Report r("ingest", *ingest_cmd);
      r.text << "query_relevance_filter=" << (rules.require_query_relevance ? "on" : "off") << '\n'
             << format_load_report(raw.report) << format_sanitization_report(clean.report)
             << "entities=" << kg.num_entities() << '\n'
             << "predicates=" << kg.num_predicates() << '\n'
             << "train=" << kg.count(Split::Train) << '\n'
             << "dev=" << kg.count(Split::Dev) << '\n'
             << "test=" << kg.count(Split::Test) << '\n';
      write_text(ws / "ingest_report.txt", r.text.str());
      out << "kept " << clean.report.kept << " of " << clean.report.input << " triplets\n";
    } else if (mine_cmd->parsed()) {
      const auto kg = load_workspace_kg(common);
      require_input(log_path, "query log");
      auto built = build_pair_table(log_path, kg, !no_decode);
      write_pair_table(built.table, kg, ws / "pairs.tsv");
      Report r("mine", *mine_cmd);
      r.text << format_log_statistics(built.stats)
             << "pairs_subject_known=" << built.table.size(Orientation::SubjectKnown) << '\n'
             << "pairs_object_known=" << built.table.size(Orientation::ObjectKnown) << '\n';
      write_text(ws / "mine_report.txt", r.text.str());
      out << "mined " << built.table.size() << " pairs\n";
    } else if (train_cmd->parsed()) {
      tc.seed = need_seed(common);
      tc.norm = parse_norm(norm);
      tc.threads = common.threads;
      const auto kg = load_workspace_kg(common);
      auto result = train(kg, tc);
      save_model(result.model, ws / "model.txt");
      Report r("train", *train_cmd);
      for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
        r.text << "epoch_" << e + 1 << "_loss=" << format_real(result.epoch_loss[e]) << '\n';
      write_text(ws / "train_report.txt", r.text.str());
      out << "trained " << tc.epochs << " epochs, final loss "
          << (result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back()) << '\n';
    } else if (predict_cmd->parsed()) {
      const auto m = parse_method(method);
      const auto kg = load_workspace_kg(common);
      require_file(ws / "model.txt", "run `kgenrich train` first");
      if (m != Method::RS) require_file(ws / "pairs.tsv", "run `kgenrich mine` first");
      const auto model = load_model(ws / "model.txt");
      sampler.threads = common.threads;
      const auto o = parse_orientation(orientation);
      PredictionRun run;
      if (m == Method::RS) {
        run = predict_rs(model, kg, n, need_seed(common), sampler);
      } else {
        const auto pairs = read_pair_table(ws / "pairs.tsv", kg);
        if (m == Method::QG) {
          QgOptions qg{o, weighting == "frequency" ? PairWeighting::Frequency
                                                  : PairWeighting::Uniform};
          run = predict_qg(model, kg, pairs, n, need_seed(common), qg, sampler);
        } else {
          run = predict_topk(model, kg, pairs, top_k, top_m, o);
        }
      }
      write_predictions(run.predictions, kg, ws / ("predictions_" + method + ".tsv"));
      Report r("predict", *predict_cmd);
      r.text << "predictions=" << run.predictions.size() << '\n' << format_proposal_stats(run.stats);
      for (const auto& w : run.warnings) r.text << "warning=" << w << '\n';
      write_text(ws / ("predict_" + method + "_report.txt"), r.text.str());
      for (const auto& w : run.warnings) err << "warning: " << w << '\n';
      out << "wrote " << run.predictions.size() << " predictions\n";
    } else if (guide_cmd->parsed()) {
      if (!km && !es) throw UsageError("guide needs --km or --es");
      const auto kg = load_workspace_kg(common);
      const fs::path pred_path = ws / ("predictions_" + method + ".tsv");
      require_file(pred_path, "run `kgenrich predict --method " + method + "` first");
      const auto predictions = read_predictions(pred_path, kg);
      const auto o = parse_orientation(orientation);
      Report r("guide", *guide_cmd);
      if (km) {
        if (entity_types.empty() || domain_range.empty())
          throw UsageError("--km needs --entity-types and --domain-range");
        require_input(entity_types, "entity type file");
        require_input(domain_range, "domain/range file");
        const auto meta = load_metadata(entity_types, domain_range, kg);
        const auto verdicts = km_partition(prediction_pairs(predictions, o), meta, kg);
        write_km(verdicts, kg, ws / ("km_" + method + ".tsv"));
        std::map<std::string, std::size_t> by_reason;
        for (const auto& v : verdicts) ++by_reason[to_string(v.reason)];
        r.text << "km_pairs=" << verdicts.size() << '\n';
        for (const auto& [reason, count] : by_reason) r.text << "km_" << reason << '=' << count << '\n';
        r.text << "metadata_warnings=" << meta.warnings.size() << '\n';
        out << "classified " << verdicts.size() << " pairs\n";
      }
      if (es) {
        const auto binning = es_bin(predictions, o);
        write_es(binning, kg, ws / ("es_" + method + ".tsv"));
        r.text << "es_pairs=" << binning.entries.size() << '\n'
               << "es_bins=" << binning.num_bins << '\n';
        for (const auto& w : binning.warnings) {
          r.text << "warning=" << w << '\n';
          err << "warning: " << w << '\n';
        }
        out << "binned " << binning.entries.size() << " pairs into " << binning.num_bins
            << " bins\n";
      }
      write_text(ws / ("guide_" + method + "_report.txt"), r.text.str());
    } else if (eval_cmd->parsed()) {
      const auto kg = load_workspace_kg(common);
      const fs::path pred_path = ws / ("predictions_" + method + ".tsv");
      require_file(pred_path, "run `kgenrich predict --method " + method + "` first");
      const auto o = parse_orientation(orientation);
      const auto predictions = read_predictions(pred_path, kg);
      auto report = evaluate(to_string(parse_method(method)), predictions, kg, o);
      if (km) {
        const fs::path p = ws / ("km_" + method + ".tsv");
        require_file(p, "run `kgenrich guide --km` first");
        for (auto& g : km_precision(read_km(p, kg, o), kg)) report.groups.push_back(g);
      }
      if (es) {
        const fs::path p = ws / ("es_" + method + ".tsv");
        require_file(p, "run `kgenrich guide --es` first");
        const auto bins = es_precision(read_es(p, kg, o), kg);
        write_text(ws / ("es_bins_" + method + ".tsv"), format_bin_precision(bins));
      }
      Report r("eval", *eval_cmd);
      write_text(ws / ("eval_" + method + ".txt"), r.text.str() + format_eval_text(report));
      write_text(ws / ("eval_" + method + ".tsv"), format_eval_tsv(report));
      out << format_eval_text(report);
    } else if (export_cmd->parsed()) {
      const auto kg = load_workspace_kg(common);
      const fs::path pred_path = ws / ("predictions_" + method + ".tsv");
      require_file(pred_path, "run `kgenrich predict --method " + method + "` first");
      const auto o = parse_orientation(orientation);
      const auto pairs = prediction_pairs(read_predictions(pred_path, kg), o);
      auto exported = export_annotation_sample(pairs, kg, sample_n, need_seed(common),
                                               ws / ("annotation_" + method + ".tsv"));
      for (const auto& w : exported.warnings) err << "warning: " << w << '\n';
      out << "exported " << exported.rows.size() << " pairs\n";
    } else if (rc_cmd->parsed()) {
      require_input(annotated, "annotated sample");
      const auto rc = rc_ratio(annotated);
      out << "rows=" << rc.rows << '\n'
          << "correct=" << rc.correct << '\n'
          << "relevant_and_correct=" << rc.relevant_and_correct << '\n'
          << "relevant_not_correct=" << rc.relevant_not_correct << '\n'
          << "rc=" << format_real(rc.ratio) << '\n';
      for (auto line : rc.flagged_lines)
        err << "warning: line " << line << " is relevant but not correct\n";
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace kgenrich
