// Copyright 2026 The Molfuse Authors.
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

#include "molfuse_cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace molfuse::cli {
namespace {

namespace fs = std::filesystem;

const std::string kData = MOLFUSE_TEST_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("molfuse_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return RunCli(args, out_, err_);
  }

  std::string At(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("prepare"), std::string::npos);
  EXPECT_EQ(Run({}), kExitConfigError);
  EXPECT_EQ(Run({"frobnicate"}), kExitConfigError);
  EXPECT_EQ(Run({"eval", "--bogus-flag"}), kExitConfigError);
}

TEST_F(CliTest, ConfigProblemsExitThree) {
  EXPECT_EQ(Run({"significance", "--config", At("missing.json"), "--a", "x", "--b",
                 "y", "--out", At("s.json")}),
            kExitConfigError);
  {
    std::ofstream(At("typo.json")) << R"({"wordd_dim": 3})";
  }
  EXPECT_EQ(Run({"significance", "--config", At("typo.json"), "--a", "x", "--b", "y",
                 "--out", At("s.json")}),
            kExitConfigError);
  EXPECT_NE(err_.str().find("wordd_dim"), std::string::npos) << err_.str();
  EXPECT_EQ(Run({"train-text", "--config", kData + "/tiny_binary.json", "--train",
                 At("t.jsonl"), "--vocab", At("v.tsv"), "--out", At("m.json")}),
            kExitConfigError);
}

TEST_F(CliTest, MissingInputExitsTwo) {
  EXPECT_EQ(Run({"eval", "--predictions", At("nope.tsv"), "--out", At("e.json")}),
            kExitDataError);
  EXPECT_NE(err_.str().find("nope.tsv"), std::string::npos) << err_.str();
}

TEST_F(CliTest, EvalReproducesWorkedExample) {
  {
    std::ofstream out(At("pred.tsv"));
    out << "pair_id\tgold\tpred\tp_mech\tp_eff\tp_adv\tp_int\tp_neg\n"
        << "a\tMechanism\tMechanism\t0.9\t0.025\t0.025\t0.025\t0.025\n"
        << "b\tMechanism\tNegative\t0.1\t0.1\t0.1\t0.1\t0.6\n"
        << "c\tNegative\tEffect\t0.1\t0.6\t0.1\t0.1\t0.1\n";
  }
  ASSERT_EQ(Run({"eval", "--predictions", At("pred.tsv"), "--out", At("e.json")}),
            kExitOk)
      << err_.str();
  std::ifstream in(At("e.json"));
  const nlohmann::json report = nlohmann::json::parse(in);
  EXPECT_EQ(report["instances"], 3);
  EXPECT_EQ(report["micro"]["precision"], 0.5);
  EXPECT_EQ(report["micro"]["recall"], 0.5);
  EXPECT_EQ(report["micro"]["f"], 0.5);
  EXPECT_EQ(report["micro"]["true_positives"], 1);
}

TEST_F(CliTest, SignificanceOfIdenticalFilesIsOne) {
  {
    std::ofstream out(At("pred.tsv"));
    out << "pair_id\tgold\tpred\tp_mech\tp_eff\tp_adv\tp_int\tp_neg\n"
        << "a\tMechanism\tMechanism\t1\t0\t0\t0\t0\n"
        << "b\tEffect\tNegative\t0\t0\t0\t0\t1\n";
  }
  ASSERT_EQ(Run({"significance", "--a", At("pred.tsv"), "--b", At("pred.tsv"),
                 "--rounds", "99", "--out", At("s.json")}),
            kExitOk)
      << err_.str();
  std::ifstream in(At("s.json"));
  EXPECT_EQ(nlohmann::json::parse(in)["p_value"], 1.0);
}

TEST_F(CliTest, PrepareWritesAllArtifacts) {
  ASSERT_EQ(Run({"prepare", "--config", kData + "/tiny_fused.json", "--train-xml",
                 kData + "/sample_train.xml", "--test-xml", kData + "/sample_test.xml",
                 "--drugs", kData + "/drugs.tsv", "--interactions",
                 kData + "/interactions.tsv", "--out", At("prep")}),
            kExitOk)
      << err_.str();
  for (const char* name : {"train_instances.jsonl", "test_instances.jsonl", "vocab.tsv",
                           "mol_train_pairs.jsonl", "mol_test_pairs.jsonl",
                           "prepare_report.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "prep" / name)) << name;
  }
  std::ifstream in(At("prep/prepare_report.json"));
  const nlohmann::json report = nlohmann::json::parse(in);
  EXPECT_GT(report.size(), 0u);
  EXPECT_FALSE(out_.str().empty());
}

}  // namespace
}  // namespace molfuse::cli
