#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "kgenrich/cli.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixture = KGENRICH_FIXTURE;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "kgenrich");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = kgenrich::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// ingest -> mine -> train -> predict (rs, qg) -> guide -> eval.
void pipeline(const fs::path& ws, const std::string& threads) {
  const std::string out = ws.string();
  const std::vector<std::vector<std::string>> steps{
      {"ingest", "--kg", kFixture + "/kg.nt", "--log", kFixture + "/queries.log", "--seed", "7"},
      {"mine", "--log", kFixture + "/queries.log"},
      {"train", "--seed", "7", "--dim", "8", "--gamma", "4", "--lr", "2", "--epochs", "10",
       "--batch-size", "64", "--negatives", "4"},
      {"predict", "--method", "rs", "--n", "60", "--seed", "7"},
      {"predict", "--method", "qg", "--n", "60", "--seed", "7"},
      {"predict", "--method", "topk", "--k", "4", "--m", "3"},
      {"guide", "--method", "qg", "--km", "--es", "--entity-types", kFixture + "/entity_types.tsv",
       "--domain-range", kFixture + "/domain_range.tsv"},
      {"eval", "--method", "qg", "--km", "--es"},
      {"eval", "--method", "rs"},
      {"export", "--method", "qg", "--n", "10", "--seed", "7"},
  };
  for (auto step : steps) {
    step.insert(step.end(), {"--out", out, "--threads", threads});
    auto r = run(step);
    ASSERT_EQ(r.code, 0) << step[0] << ": " << r.err;
  }
}

}  // namespace

TEST(Cli, FullPipelineOnFixture) {
  testutil::TempDir dir("cli");
  pipeline(dir.path(), "1");
  for (const char* f : {"ingest_report.txt", "pairs.tsv", "model.txt", "train_report.txt",
                        "predictions_rs.tsv", "predictions_qg.tsv", "predictions_topk.tsv",
                        "km_qg.tsv", "es_qg.tsv", "eval_qg.txt", "eval_qg.tsv", "eval_rs.tsv",
                        "es_bins_qg.tsv", "annotation_qg.tsv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto report = testutil::read_file(dir / "eval_qg.txt");
  EXPECT_EQ(report.rfind("command=eval\nconfig_digest=", 0), 0u);
  EXPECT_NE(report.find("group compatible"), std::string::npos);
}

TEST(Cli, ThreadCountDoesNotChangeOutputs) {
  testutil::TempDir a("cli"), b("cli");
  pipeline(a.path(), "1");
  pipeline(b.path(), "4");
  for (const char* f : {"model.txt", "predictions_rs.tsv", "predictions_qg.tsv",
                        "predictions_topk.tsv", "km_qg.tsv", "es_qg.tsv", "eval_qg.tsv",
                        "predict_rs_report.txt", "predict_qg_report.txt", "train_report.txt",
                        "annotation_qg.tsv"})
    EXPECT_EQ(testutil::read_file(a / f), testutil::read_file(b / f)) << f;
}

TEST(Cli, PredictWithoutModelIsUsageError) {
  testutil::TempDir dir("cli");
  ASSERT_EQ(run({"ingest", "--kg", kFixture + "/kg.nt", "--seed", "1", "--out", dir.path().string()})
                .code,
            0);
  auto r = run({"predict", "--method", "rs", "--n", "5", "--seed", "1", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("train"), std::string::npos);
}

TEST(Cli, MissingSeedIsUsageError) {
  testutil::TempDir dir("cli");
  auto r = run({"ingest", "--kg", kFixture + "/kg.nt", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
}

TEST(Cli, UnknownCommandAndBadValues) {
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  testutil::TempDir dir("cli");
  auto r = run({"ingest", "--kg", kFixture + "/kg.nt", "--seed", "1", "--train-ratio", "0.9",
                "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  testutil::TempDir dir("cli");
  const auto ws = dir.path().string();
  ASSERT_EQ(run({"ingest", "--kg", kFixture + "/kg.nt", "--seed", "3", "--out", ws}).code, 0);
  testutil::write_file(dir / "train.conf", "# comment\ndim = 4\nepochs = 3\nseed = 3\n");
  ASSERT_EQ(run({"train", "--config", (dir / "train.conf").string(), "--epochs", "2", "--out", ws})
                .code,
            0);
  const auto report = testutil::read_file(dir / "train_report.txt");
  EXPECT_NE(report.find("epoch_2_loss"), std::string::npos);
  EXPECT_EQ(report.find("epoch_3_loss"), std::string::npos);
  EXPECT_NE(testutil::read_file(dir / "model.txt").find("dim=4"), std::string::npos);

  testutil::write_file(dir / "bad.conf", "dim 4\n");
  EXPECT_EQ(run({"train", "--config", (dir / "bad.conf").string(), "--seed", "1", "--out", ws}).code,
            2);
}

TEST(Cli, SameSeedSameBytes) {
  testutil::TempDir a("cli"), b("cli");
  for (const auto* d : {&a, &b}) {
    const auto ws = d->path().string();
    ASSERT_EQ(run({"synth", "--seed", "5", "--types", "2", "--entities-per-type", "10",
                   "--predicates", "3", "--out", ws})
                  .code,
              0);
    ASSERT_EQ(run({"ingest", "--kg", (d->path() / "kg.nt").string(), "--seed", "5", "--out", ws}).code,
              0);
    ASSERT_EQ(run({"synth-log", "--seed", "5", "--queries", "50", "--out", ws}).code, 0);
  }
  for (const char* f : {"kg.nt", "entity_types.tsv", "domain_range.tsv", "queries.log",
                        "kg/train.tsv", "kg/test.tsv"})
    EXPECT_EQ(testutil::read_file(a / f), testutil::read_file(b / f)) << f;
}
