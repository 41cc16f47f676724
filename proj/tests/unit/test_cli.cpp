/*
 * Copyright 2026 The protohg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "protohg/io.hpp"
#include "support.hpp"

namespace protohg {
namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args) {
  static int counter = 0;
  const auto log = std::filesystem::temp_directory_path() /
                   ("protohg_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  const std::string cmd = std::string(PROTOHG_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_file(log);
  std::filesystem::remove(log);
  return r;
}

const char* kTiny =
    " --set model.D=8 --set model.D_T=4 --set model.D_N=4 --set model.M=2 --set model.heads=2"
    " --set model.blocks=1 --set data.history=4 --set data.horizon=3 --set train.batch_size=16"
    " --set train.lr=0.01 --set run.threads=1";

std::vector<nlohmann::json> read_history(const std::filesystem::path& dir) {
  std::ifstream in(dir / "history.jsonl");
  std::vector<nlohmann::json> rows;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

// One trained run shared by the tests below.
class TrainedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::temp_dir("cli_run") / "run";
    const auto r = cli("train --seed 3" + std::string(kTiny) +
                       " --set train.max_epochs=10 --set run.run_dir=" + dir_.string());
    code_ = r.code;
    out_ = r.out;
  }
  static std::filesystem::path dir_;
  static int code_;
  static std::string out_;
};
std::filesystem::path TrainedRun::dir_;
int TrainedRun::code_ = -1;
std::string TrainedRun::out_;

TEST_F(TrainedRun, WritesArtifacts) {
  ASSERT_EQ(code_, 0) << out_;
  for (const char* f :
       {"config.json", "history.jsonl", "checkpoint.json", "metrics.json", "embeddings.csv"})
    EXPECT_TRUE(std::filesystem::exists(dir_ / f)) << f;
  auto rows = read_history(dir_);
  ASSERT_FALSE(rows.empty());
  for (const char* k : {"epoch", "split", "mae", "rmse", "mape", "wall_time"})
    EXPECT_TRUE(rows[0].contains(k)) << k;
  auto cfg = nlohmann::json::parse(io::read_file(dir_ / "config.json"));
  EXPECT_EQ(cfg["run"]["seed"], 3);
  EXPECT_EQ(cfg["model"]["D"], 8);
}

TEST_F(TrainedRun, EvalOnTrainingSplitBeatsValidationHistory) {
  ASSERT_EQ(code_, 0) << out_;
  double best_val = 1e300;
  for (const auto& r : read_history(dir_))
    if (r["split"] == "val") best_val = std::min(best_val, r["mae"].get<double>());
  const auto report = testing::temp_dir("cli_eval") / "train.json";
  auto r = cli("eval " + (dir_ / "checkpoint.json").string() + " --split train --out " +
               report.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(io::read_file(report));
  EXPECT_LE(j["mae"].get<double>(), best_val);
  auto test = cli("eval " + (dir_ / "checkpoint.json").string() + " --split test");
  EXPECT_EQ(test.code, 0);
  for (const char* k : {"MAE", "RMSE", "MAPE"}) EXPECT_NE(test.out.find(k), std::string::npos);
  EXPECT_EQ(test.out.find("nan"), std::string::npos);
}

TEST_F(TrainedRun, ExportsOneRowPerNode) {
  ASSERT_EQ(code_, 0) << out_;
  auto r = cli("export-embeddings " + (dir_ / "checkpoint.json").string());
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "node_id,e0,e1,e2,e3");
  std::size_t rows = 0;
  while (std::getline(in, line)) rows += !line.empty();
  EXPECT_EQ(rows, 6u);
}

TEST_F(TrainedRun, NodeCountMismatchIsReported) {
  ASSERT_EQ(code_, 0) << out_;
  const auto data_dir = testing::temp_dir("cli_seven");
  ASSERT_EQ(cli("synth --set synthetic.nodes=7 --out " + data_dir.string()).code, 0);
  auto r = cli("eval " + (dir_ / "checkpoint.json").string() + " --dataset " +
               (data_dir / "synthetic.desc").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("N=7"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("N=6"), std::string::npos) << r.out;
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  auto bad_key = cli("train --set model.Mx=3");
  EXPECT_EQ(bad_key.code, 2);
  EXPECT_NE(bad_key.out.find("model.Mx"), std::string::npos);
  auto bad_variant = cli("ablate --variant no_everything");
  EXPECT_EQ(bad_variant.code, 2);
  EXPECT_NE(bad_variant.out.find("no_res_global"), std::string::npos) << bad_variant.out;
  EXPECT_EQ(cli("train --config /nonexistent/config.json").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("eval x.json --split holdout").code, 2);
}

TEST(Cli, RuntimeFailuresExitWithOne) {
  auto missing = cli("eval /nonexistent/checkpoint.json");
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.out.find("not found"), std::string::npos);
  EXPECT_EQ(cli("export-embeddings /nonexistent/checkpoint.json").code, 1);
  EXPECT_EQ(cli("train --set data.dataset=/nonexistent/data.desc").code, 1);
}

TEST(Cli, AblationRunRecordsVariant) {
  const auto dir = testing::temp_dir("cli_ablate") / "run";
  auto r = cli("ablate --variant no_res" + std::string(kTiny) +
               " --set model.blocks=2 --set train.max_epochs=1 --set train.max_batches_per_epoch=2"
               " --set run.run_dir=" + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  auto cfg = nlohmann::json::parse(io::read_file(dir / "config.json"));
  EXPECT_EQ(cfg["ablation"]["variant"], "no_res");
  auto ck = nlohmann::json::parse(io::read_file(dir / "checkpoint.json"));
  std::size_t block1 = 0;
  for (const auto& [name, _] : ck["params"].items()) block1 += name.rfind("block1.", 0) == 0;
  EXPECT_EQ(block1, 0u);
}

TEST(Cli, SameSeedSameHistory) {
  std::vector<std::vector<double>> maes;
  for (int i = 0; i < 2; ++i) {
    const auto dir = testing::temp_dir("cli_det" + std::to_string(i)) / "run";
    auto r = cli("train --seed 9" + std::string(kTiny) +
                 " --set train.max_epochs=2 --set train.max_batches_per_epoch=4"
                 " --set run.run_dir=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    std::vector<double> v;
    for (const auto& row : read_history(dir)) v.push_back(row["mae"].get<double>());
    maes.push_back(v);
  }
  EXPECT_EQ(maes[0], maes[1]);
}

TEST(Cli, VerifyPasses) {
  auto r = cli("verify --instances 10");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace protohg
