#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "kst/data_io.hpp"
#include "kst/report.hpp"
#include "kst_cli/cli.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = kst::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("kst_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, SimulateRowCounts) {
  const auto r = run({"simulate", "--dim", "4", "--out-dir", dir_.string(), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto train = kst::load_matrix_csv(path("train.csv"));
  const auto test = kst::load_matrix_csv(path("test.csv"));
  EXPECT_EQ(train.values.rows(), 1250);
  EXPECT_EQ(test.values.rows(), 1000);
  EXPECT_EQ(train.values.cols(), 4);
  EXPECT_EQ(train.column_names.front(), "x1");
}

TEST_F(CliTest, SimulateIsDeterministic) {
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  ASSERT_EQ(run({"simulate", "--dim", "3", "--n", "50", "--n-alt", "20", "--out-dir", path("a"), "--seed", "9"}).code, 0);
  ASSERT_EQ(run({"simulate", "--dim", "3", "--n", "50", "--n-alt", "20", "--out-dir", path("b"), "--seed", "9"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "train.csv"), slurp(dir_ / "b" / "train.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "test.csv"), slurp(dir_ / "b" / "test.csv"));
}

TEST_F(CliTest, SimulateOutputChecks) {
  EXPECT_EQ(run({"simulate", "--out-dir", path("missing"), "--seed", "1"}).code, kst::cli::kExitError);
  ASSERT_EQ(run({"simulate", "--n", "20", "--n-alt", "10", "--out-dir", dir_.string(), "--seed", "1"}).code, 0);
  const auto again = run({"simulate", "--n", "20", "--n-alt", "10", "--out-dir", dir_.string(), "--seed", "1"});
  EXPECT_EQ(again.code, kst::cli::kExitError);
  EXPECT_NE(again.err.find("--force"), std::string::npos) << again.err;
  EXPECT_EQ(run({"simulate", "--n", "20", "--n-alt", "10", "--out-dir", dir_.string(), "--seed", "1", "--force"}).code, 0);
}

TEST_F(CliTest, UnseededRunPrintsSeed) {
  const auto r = run({"simulate", "--n", "10", "--n-alt", "10", "--out-dir", dir_.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("seed: "), std::string::npos) << r.out;
}

TEST_F(CliTest, SvmSetMostlySameOnNullSets) {
  ASSERT_EQ(run({"simulate", "--dim", "2", "--n", "300", "--n-alt", "10", "--out-dir", dir_.string(), "--seed", "4"}).code, 0);
  ASSERT_EQ(run({"train", "--method", "svm-set", "--train", path("train.csv"), "--out", path("model.txt"),
                 "--subsets", "60", "--seed", "2"})
                .code,
            0);
  const auto train = kst::load_matrix_csv(path("train.csv")).values;
  int same = 0;
  for (int t = 0; t < 40; ++t) {
    const auto set = kst::sample_isotropic(2, 1.5, 7, 1000 + t);
    {
      std::ofstream o(path("set.csv"), std::ios::binary);
      kst::write_matrix_csv(o, set);
    }
    const auto r = run({"test", "--method", "svm-set", "--model", path("model.txt"), "--test", path("set.csv")});
    ASSERT_NE(r.code, kst::cli::kExitError) << r.err;
    same += r.code == kst::cli::kExitSame;
    EXPECT_NE(r.out.find(r.code == 0 ? "decision: Same" : "decision: Different"), std::string::npos);
  }
  EXPECT_GE(same, 32);
}

TEST_F(CliTest, MmdZeroThresholdSaysDifferent) {
  ASSERT_EQ(run({"simulate", "--dim", "2", "--n", "100", "--n-alt", "7", "--out-dir", dir_.string(), "--seed", "4"}).code, 0);
  const auto r = run({"test", "--method", "mmd", "--train", path("train.csv"), "--test", path("test.csv"),
                      "--threshold", "0", "--seed", "1", "--out", path("result.txt")});
  EXPECT_EQ(r.code, kst::cli::kExitDifferent) << r.err;
  EXPECT_NE(slurp(path("result.txt")).find("decision=Different"), std::string::npos);
}

TEST_F(CliTest, ClassicalTestsRun) {
  ASSERT_EQ(run({"simulate", "--dim", "3", "--n", "100", "--n-alt", "7", "--out-dir", dir_.string(), "--seed", "4"}).code, 0);
  for (const char* m : {"f-test", "t-test"}) {
    const auto r = run({"test", "--method", m, "--train", path("train.csv"), "--test", path("test.csv"), "--seed", "1"});
    EXPECT_NE(r.code, kst::cli::kExitError) << r.err;
    EXPECT_NE(r.out.find("decision: "), std::string::npos);
  }
}

TEST_F(CliTest, MalformedCsvIsAnError) {
  {
    std::ofstream o(path("bad.csv"));
    o << "1,2\n3\n";
  }
  const auto r = run({"test", "--method", "f-test", "--train", path("bad.csv"), "--test", path("bad.csv")});
  EXPECT_GE(r.code, 2);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownFlagIsAnError) {
  EXPECT_EQ(run({"simulate", "--out-dir", dir_.string(), "--bogus", "1"}).code, kst::cli::kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kst::cli::kExitError);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ConfigFileLosesToCommandLine) {
  {
    std::ofstream o(path("run.conf"));
    o << "# comment\ndim = 6\nn = 30\nn-alt = 10\nseed = 5\n";
  }
  ASSERT_EQ(run({"simulate", "--config", path("run.conf"), "--out-dir", dir_.string(), "--dim", "2"}).code, 0);
  const auto train = kst::load_matrix_csv(path("train.csv")).values;
  EXPECT_EQ(train.cols(), 2);
  EXPECT_EQ(train.rows(), 30);
}

TEST_F(CliTest, BenchmarkGaussianShape) {
  const auto r = run({"benchmark", "gaussian", "--dims", "2,3,4,5,6", "--reps", "1", "--trials", "10", "--n-train", "40",
                      "--n-null", "30", "--n-alt", "30", "--subsets", "10", "--mmd-iters", "20", "--seed", "1",
                      "--out", path("g.json"), "--csv", path("g.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("g.json"));
  const auto report = kst::read_report_json(in);
  EXPECT_EQ(report.records.size(), 15u);
  EXPECT_EQ(report.find("MMD", 6).null_trials, 10u);
  EXPECT_NE(r.out.find("type-I %"), std::string::npos);
}

TEST_F(CliTest, BenchmarkExpressionFixture) {
  const auto r = run({"benchmark", "expression", "--fixture", "colon", "--reps", "1", "--trials", "20", "--seed", "2",
                      "--out", path("e.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("e.json"));
  const auto report = kst::read_report_json(in);
  EXPECT_EQ(report.records.size(), 3u);
  EXPECT_EQ(report.config.at("set_size"), "4");
  EXPECT_EQ(report.find("SVM+SetKernel", "colon").type_i, 0.0);
}

}  // namespace
