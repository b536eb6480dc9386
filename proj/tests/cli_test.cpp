#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "dybm/io.hpp"
#include "dybm/learning.hpp"

namespace fs = std::filesystem;

namespace dybm {
namespace {

const std::string kFixtures = DYBM_FIXTURE_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dybm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("dybm_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, TrainZeroEpochsWritesZeroModel) {
  const auto r = run_cli({"train", "--data", kFixtures + "/period4.csv", "--out", path("m.json"), "--epochs", "0"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto ck = read_checkpoint_file(path("m.json"));
  for (double b : ck.params.bias) EXPECT_EQ(b, 0.0);
  for (double u : ck.params.u) EXPECT_EQ(u, 0.0);
  const auto line = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  EXPECT_EQ(line.at("epoch"), 0);
}

TEST_F(CliTest, TrainRejectsNonBinaryCsv) {
  const auto data = write("bad.csv", "u0,u1\n1,0\n2,1\n");
  const auto r = run_cli({"train", "--data", data, "--out", path("m.json")});
  EXPECT_EQ(r.code, cli::kBadInput);
  EXPECT_NE(r.err.find("row 3, column 1"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(CliTest, TrainRejectsUnknownConfigKey) {
  const auto cfg = write("run.json", R"({"trainer": {"learning_rat": 0.1}})");
  const auto r = run_cli({"train", "--config", cfg, "--data", kFixtures + "/period4.csv", "--out", path("m.json")});
  EXPECT_EQ(r.code, cli::kBadInput);
}

TEST_F(CliTest, TrainRejectsInvalidRate) {
  const auto cfg = write("run.json", R"({"model": {"mus": [1.0]}})");
  const auto r = run_cli({"train", "--config", cfg, "--data", kFixtures + "/period4.csv", "--out", path("m.json")});
  EXPECT_EQ(r.code, cli::kBadInput);
}

TEST_F(CliTest, EvalZeroModelGivesLnTwoPerBit) {
  ASSERT_EQ(run_cli({"train", "--data", kFixtures + "/random3.csv", "--out", path("m.json"), "--epochs", "0"}).code,
            cli::kOk);
  const auto r = run_cli({"eval", "--model", path("m.json"), "--data", kFixtures + "/random3.csv"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("nll_per_bit").get<double>(), std::log(2.0), 1e-12);
  EXPECT_EQ(j.at("steps"), 32);
}

TEST_F(CliTest, EvalUnitCountMismatch) {
  ASSERT_EQ(run_cli({"train", "--data", kFixtures + "/random3.csv", "--out", path("m.json"), "--epochs", "0"}).code,
            cli::kOk);
  const auto r = run_cli({"eval", "--model", path("m.json"), "--data", kFixtures + "/period4.csv"});
  EXPECT_EQ(r.code, cli::kBadInput);
}

TEST_F(CliTest, EvalMatchesInProcessTraining) {
  const auto r = run_cli({"train", "--config", kFixtures + "/period4_run.json", "--data",
                          kFixtures + "/period4.csv", "--out", path("m.json"), "--epochs", "25"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto series = read_series_file(kFixtures + "/period4.csv");
  const auto config = ModelConfig::dense(2, 2, {0.5}, {0.25}, 1.0);
  TrainerConfig t;
  t.learning_rate = 0.1;
  t.epochs = 25;
  const auto trained = train(Parameters::zeros(config), config, {series}, t);
  const auto e = nlohmann::json::parse(run_cli({"eval", "--model", path("m.json"), "--data",
                                                kFixtures + "/period4.csv"}).out);
  EXPECT_EQ(e.at("log_likelihood").get<double>(), sequence_log_likelihood(trained.params, config, series));
}

TEST_F(CliTest, GenerateIsReproducibleForSeed) {
  ASSERT_EQ(run_cli({"train", "--config", kFixtures + "/period4_run.json", "--data", kFixtures + "/period4.csv",
                     "--out", path("m.json"), "--epochs", "10"})
                .code,
            cli::kOk);
  const std::vector<std::string> args{"generate", "--model", path("m.json"), "--horizon", "40",
                                      "--mode",   "sample",  "--seed",       "11"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::istringstream csv(a.out);
  EXPECT_EQ(read_series_csv(csv).size(), 40u);
  EXPECT_EQ(run_cli({"generate", "--model", path("m.json"), "--horizon", "0"}).code, cli::kBadInput);
}

TEST_F(CliTest, KernelDumpRowsAndErrors) {
  const auto cfg = write("run.json", R"({"model": {"connectivity": [[0, 1, 2]]}})");
  ASSERT_EQ(run_cli({"train", "--config", cfg, "--data", kFixtures + "/period4.csv", "--out", path("m.json"),
                     "--epochs", "0"})
                .code,
            cli::kOk);
  const auto r = run_cli({"kernel-dump", "--model", path("m.json"), "--pre", "0", "--post", "1", "--max-delta", "5"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "delta,w_pre_post,w_post_pre_reversed,w_total");
  int rows = 0;
  for (std::string l; std::getline(lines, l);) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_EQ(run_cli({"kernel-dump", "--model", path("m.json"), "--pre", "1", "--post", "1"}).code, cli::kBadInput);
  EXPECT_EQ(run_cli({"kernel-dump", "--model", path("m.json"), "--pre", "0", "--post", "7"}).code, cli::kBadInput);
}

TEST_F(CliTest, ValidateExitCodes) {
  const auto ok = run_cli({"validate"});
  EXPECT_EQ(ok.code, cli::kOk);
  EXPECT_NE(ok.out.find("all properties passed"), std::string::npos);
  const auto bad = run_cli({"validate", "--inject-fault", "alpha-printed"});
  EXPECT_EQ(bad.code, cli::kValidationFailed);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(run_cli({"validate", "--inject-fault", "bogus"}).code, cli::kBadInput);
}

TEST_F(CliTest, BenchStorageCountsMatch) {
  const auto r = run_cli({"bench", "--sizes", "8,16", "--steps", "50"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.at("counts_match").get<bool>());
  ASSERT_EQ(j.at("sizes").size(), 2u);
  for (const auto& row : j.at("sizes")) {
    EXPECT_EQ(row.at("trace_reals"), row.at("trace_reals_expected"));
    EXPECT_EQ(row.at("queue_bits"), row.at("queue_bits_expected"));
    EXPECT_EQ(row.at("parameter_reals"), row.at("parameter_reals_expected"));
  }
}

TEST_F(CliTest, DivergenceExitsThree) {
  const auto r = run_cli({"train", "--data", kFixtures + "/period4.csv", "--out", path("m.json"), "--learning-rate",
                          "1e9", "--epochs", "5"});
  EXPECT_EQ(r.code, cli::kDiverged);
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(CliTest, UnknownSubcommandOrMissingArgument) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kBadInput);
  EXPECT_EQ(run_cli({"eval", "--model", path("none.json")}).code, cli::kBadInput);
  EXPECT_EQ(run_cli({"eval", "--model", path("none.json"), "--data", kFixtures + "/period4.csv"}).code,
            cli::kBadInput);
}

}  // namespace
}  // namespace dybm
