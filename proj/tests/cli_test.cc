// Copyright 2026 The sciex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sciex/corpus_io.h"
#include "test_support.h"

namespace sciex {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("sciex_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string &name) const { return (dir_ / name).string(); }

  RunResult Run(const std::string &args) const {
    const std::string out = Path("stdout.txt");
    const std::string err = Path("stderr.txt");
    const std::string command = std::string("\"") + SCIEX_CLI_PATH + "\" " + args +
                                " > \"" + out + "\" 2> \"" + err + "\"";
    const int status = std::system(command.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = ReadFile(out);
    r.err = ReadFile(err);
    return r;
  }

  // Runs `args` twice writing to the same `output` and compares the bytes.
  void ExpectReproducible(const std::string &args, const std::string &output) const {
    ASSERT_EQ(Run(args).code, 0);
    const std::string first = ReadFile(output);
    ASSERT_EQ(Run(args).code, 0);
    EXPECT_EQ(ReadFile(output), first) << args;
  }

  std::string SampleDir() const { return testing::DataPath("sample_abstract"); }

  fs::path dir_;
};

std::set<std::string> DocIds(const fs::path &path) {
  std::set<std::string> ids;
  for (const auto &s : ReadCorpusJsonl(path)) ids.insert(s.doc_id);
  return ids;
}

nlohmann::json FirstLine(const fs::path &path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return nlohmann::json::parse(line);
}

TEST_F(CliTest, HelpAndVersionSucceed) {
  const RunResult help = Run("--help");
  EXPECT_EQ(help.code, 0);
  for (const char *sub : {"convert", "stats", "split", "train-ner", "train-rel",
                          "predict", "eval", "map-schema", "select", "curve"}) {
    EXPECT_NE(help.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_EQ(Run("--version").code, 0);
  EXPECT_EQ(Run("eval --help").code, 0);
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Run("").code, 1);
  EXPECT_EQ(Run("frobnicate").code, 1);
  EXPECT_EQ(Run("convert --brat " + SampleDir()).code, 1);  // --out missing
  const RunResult bad = Run("split --in x.jsonl --out-dir d --seed notanumber");
  EXPECT_EQ(bad.code, 1);
  EXPECT_FALSE(bad.err.empty());
}

TEST_F(CliTest, InputErrorsExitTwo) {
  EXPECT_EQ(Run("stats --in " + Path("missing.jsonl")).code, 2);
  {
    std::ofstream(Path("bad.jsonl")) << "{\"doc_id\": \"a\", \"sent_index\": 0, \"tokens\": [\n";
  }
  const RunResult r = Run("stats --in " + Path("bad.jsonl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, ValidationErrorsExitOne) {
  ASSERT_EQ(Run("convert --brat " + SampleDir() + " --out " + Path("c.jsonl")).code, 0);
  EXPECT_EQ(Run("select --in " + Path("c.jsonl") + " --strategy AL --out " +
                Path("w.jsonl"))
                .code,
            1);  // AL without a model
  EXPECT_EQ(Run("select --in " + Path("c.jsonl") + " --strategy RAND --ratio 2 --out " +
                Path("w.jsonl"))
                .code,
            1);
  EXPECT_EQ(Run("map-schema --brat " + SampleDir() + " --preset nope --out " +
                Path("m.jsonl"))
                .code,
            1);
}

TEST_F(CliTest, ConvertIsDeterministicAndRecordsProvenance) {
  ExpectReproducible("convert --brat " + SampleDir() + " --out " + Path("a.jsonl"),
                     Path("a.jsonl"));
  const auto meta = FirstLine(Path("a.jsonl"))["meta"];
  EXPECT_EQ(meta["command"], "convert");
  EXPECT_EQ(meta["seed"], 13);
  EXPECT_TRUE(meta.contains("tool_version"));
  EXPECT_TRUE(meta["config"].contains("brat"));
  const auto sentences = ReadCorpusJsonl(fs::path(Path("a.jsonl")));
  EXPECT_EQ(sentences.size(), 9u);
}

TEST_F(CliTest, StatsReportsSampleCounts) {
  const RunResult r = Run("stats --brat " + SampleDir() + " --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["sentences"], 9);
  EXPECT_EQ(j["entities"], 22);
  EXPECT_EQ(j["relations"], 8);
}

TEST_F(CliTest, SplitOfSixtySevenAbstracts) {
  WriteCorpusJsonl(fs::path(Path("all.jsonl")), testing::SeparableCorpus(335, 1, "abs"));
  ASSERT_EQ(DocIds(Path("all.jsonl")).size(), 67u);
  const RunResult r = Run("split --in " + Path("all.jsonl") + " --out-dir " + Path("s"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto train = DocIds(Path("s/train.jsonl"));
  const auto dev = DocIds(Path("s/dev.jsonl"));
  const auto test = DocIds(Path("s/test.jsonl"));
  EXPECT_EQ(train.size(), 33u);
  EXPECT_EQ(dev.size(), 17u);
  EXPECT_EQ(test.size(), 17u);
  std::set<std::string> all(train);
  all.insert(dev.begin(), dev.end());
  all.insert(test.begin(), test.end());
  EXPECT_EQ(all.size(), 67u);
  EXPECT_EQ(FirstLine(Path("s/dev.jsonl"))["meta"]["part"], "dev");

  ExpectReproducible("split --in " + Path("all.jsonl") + " --out-dir " + Path("s"),
                     Path("s/test.jsonl"));
  ASSERT_EQ(Run("split --in " + Path("all.jsonl") + " --out-dir " + Path("u") +
                " --seed 99")
                .code,
            0);
  EXPECT_NE(DocIds(Path("u/test.jsonl")), test);
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  WriteCorpusJsonl(fs::path(Path("all.jsonl")), testing::SeparableCorpus(40, 1, "abs"));
  {
    std::ofstream(Path("cfg.json")) << R"({"seed": 99, "split": {"in": ")" +
                                           Path("all.jsonl") + R"(", "out-dir": ")" +
                                           Path("cfg") + R"("}})";
  }
  const RunResult r = Run("--config " + Path("cfg.json") + " split");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(FirstLine(Path("cfg/train.jsonl"))["meta"]["seed"], 99);
  ASSERT_EQ(Run("--config " + Path("cfg.json") + " --seed 5 split").code, 0);
  EXPECT_EQ(FirstLine(Path("cfg/train.jsonl"))["meta"]["seed"], 5);
  {
    std::ofstream(Path("extra.json")) << R"({"sed": 1})";
  }
  EXPECT_EQ(Run("--config " + Path("extra.json") + " split --in " + Path("all.jsonl") +
                " --out-dir " + Path("x"))
                .code,
            1);
}

TEST_F(CliTest, TrainPredictEvalPipeline) {
  WriteCorpusJsonl(fs::path(Path("train.jsonl")), testing::NumberOfCorpus(60, 1, "tr"));
  WriteCorpusJsonl(fs::path(Path("dev.jsonl")), testing::NumberOfCorpus(20, 2, "dv"));
  const std::string common = " --train " + Path("train.jsonl") + " --dev " +
                             Path("dev.jsonl") + " --dim 16 --epochs 4";
  ExpectReproducible("train-ner" + common + " --out " + Path("ner1.json"),
                     Path("ner1.json"));
  ASSERT_EQ(Run("train-rel" + common + " --mixer --out " + Path("rel.json")).code, 0);

  const RunResult predict =
      Run("predict --in " + Path("dev.jsonl") + " --ner-model " + Path("ner1.json") +
          " --rel-model " + Path("rel.json") + " --out " + Path("pred.jsonl") +
          " --relations-out " + Path("rels.jsonl"));
  ASSERT_EQ(predict.code, 0) << predict.err;
  EXPECT_EQ(ReadCorpusJsonl(fs::path(Path("pred.jsonl"))).size(), 20u);

  const std::string eval = "eval --gold " + Path("dev.jsonl") + " --pred " +
                           Path("pred.jsonl") + " --format json --regime ";
  const RunResult exact = Run(eval + "exact");
  const RunResult relaxed = Run(eval + "relaxed");
  ASSERT_EQ(exact.code, 0) << exact.err;
  ASSERT_EQ(relaxed.code, 0) << relaxed.err;
  const double exact_f1 = nlohmann::json::parse(exact.out)["f1"];
  const double relaxed_f1 = nlohmann::json::parse(relaxed.out)["f1"];
  EXPECT_GE(relaxed_f1, exact_f1);
  EXPECT_EQ(Run(eval + "fuzzy").code, 1);
}

TEST_F(CliTest, MapSchemaReportsRetention) {
  const RunResult r = Run("map-schema --brat " + SampleDir() +
                          " --preset annotated-materials-syntheses --out " +
                          Path("m.jsonl") + " --dropped " + Path("dropped.jsonl"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["entities"]["total"], 22);
  EXPECT_EQ(j["relations"]["total"], 8);
  EXPECT_EQ(j["meta"]["mapping"]["name"], "annotated-materials-syntheses");
  EXPECT_TRUE(fs::exists(Path("dropped.jsonl")));
}

TEST_F(CliTest, SelectAndCurve) {
  WriteCorpusJsonl(fs::path(Path("pool.jsonl")), testing::TwoClusterCorpus(8, 1, "p"));
  WriteCorpusJsonl(fs::path(Path("dev.jsonl")), testing::TwoClusterCorpus(2, 2, "d"));
  ASSERT_EQ(Run("select --in " + Path("pool.jsonl") + " --strategy RAND --out " +
                Path("w.jsonl") + " --plan " + Path("plan.json"))
                .code,
            0);
  const auto plan = nlohmann::json::parse(ReadFile(Path("plan.json")));
  EXPECT_EQ(plan["chosen"].size(), 32u);

  const RunResult curve =
      Run("curve --train " + Path("pool.jsonl") + " --dev " + Path("dev.jsonl") +
          " --strategy FULL AL --seeds 2 --dim 16 --epochs 3 --out " + Path("c.csv"));
  ASSERT_EQ(curve.code, 0) << curve.err;
  std::istringstream csv(ReadFile(Path("c.csv")));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(csv, line);
  EXPECT_EQ(line, "strategy,seed,cycle,cumulative_cost_tokens,entity_dev_f1,relation_dev_f1");
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 2 * 2 * 2);  // strategies x seeds x cycles
}

}  // namespace
}  // namespace sciex
