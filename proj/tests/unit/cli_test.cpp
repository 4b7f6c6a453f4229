#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("critwin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(CRITWIN_CLI_PATH) + " " + args + " > " + path("stdout") + " 2> " +
                            path("stderr");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }
  void write(const std::string& name, const std::string& text) {
    std::ofstream out(path(name), std::ios::binary);
    out << text;
  }
  nlohmann::json stdout_json() const { return nlohmann::json::parse(slurp("stdout")); }

  fs::path dir_;
};

TEST_F(Cli, ValidateExitReflectsConditionD) {
  EXPECT_EQ(run("validate --family mixed13 --n 100000"), 0);
  const auto j = stdout_json();
  EXPECT_EQ(j["q"], "0");
  EXPECT_TRUE(j["condition_d"]["pass_a"].get<bool>());
  EXPECT_EQ(run("validate --family mixed13 --n 1000"), 1);
  EXPECT_FALSE(stdout_json()["condition_d"]["pass_a"].get<bool>());
}

TEST_F(Cli, ValidateDegreeFile) {
  write("deg.txt", "RLE\n3 1\n1 3\n");
  EXPECT_EQ(run("validate --degrees " + path("deg.txt")), 1);  // max degree bound fails at n = 4
  const auto j = stdout_json();
  EXPECT_EQ(j["q"], "0");
  EXPECT_EQ(j["r"], "1");
  EXPECT_TRUE(j["observations"]["edges_upper"].get<bool>());
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("validate --family mixed13 --n 100 --bogus"), 2);
  EXPECT_EQ(run(""), 2);
  write("odd.txt", "1\n1\n1\n");
  EXPECT_EQ(run("validate --degrees " + path("odd.txt")), 2);
  write("zero.txt", "1\n0\n1\n");
  EXPECT_EQ(run("validate --degrees " + path("zero.txt")), 2);
  EXPECT_EQ(run("validate --degrees " + path("missing.txt")), 2);
  EXPECT_EQ(run("validate --degrees " + path("odd.txt") + " --family mixed13"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, SampleIsReproducible) {
  ASSERT_EQ(run("sample --family mixed13 --n 500 --seed 5 --out " + path("a.txt")), 0);
  ASSERT_EQ(run("sample --family mixed13 --n 500 --seed 5 --out " + path("b.txt")), 0);
  EXPECT_EQ(slurp("a.txt"), slurp("b.txt"));
  EXPECT_FALSE(slurp("a.txt").empty());
  ASSERT_EQ(run("sample --family mixed13 --n 500 --out " + path("c.txt")), 0);
  EXPECT_TRUE(stdout_json().contains("seed"));
}

TEST_F(Cli, SampleSimpleExhausts) {
  write("loop.txt", "2\n");
  EXPECT_EQ(run("sample --degrees " + path("loop.txt") + " --simple --seed 1 --out " + path("e.txt")), 1);
  write("edge.txt", "1\n1\n");
  EXPECT_EQ(run("sample --degrees " + path("edge.txt") + " --simple --seed 1 --out " + path("e.txt")), 0);
  EXPECT_EQ(slurp("e.txt"), "0 1\n");
}

TEST_F(Cli, ExploreWritesCensusAndTrace) {
  ASSERT_EQ(run("explore --family mixed13 --n 2000 --seed 3 --census " + path("c.csv") + " --trace " +
                path("t.csv")),
            0);
  const auto census = slurp("c.csv");
  EXPECT_EQ(census.substr(0, census.find('\n')), "component_id,vertices,edges,excess,class");
  const auto trace = slurp("t.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "t,y,d_total,q_t,r_t,eta,component_id");
  const auto first = census;
  ASSERT_EQ(run("explore --family mixed13 --n 2000 --seed 3 --census " + path("c.csv")), 0);
  EXPECT_EQ(slurp("c.csv"), first);
}

TEST_F(Cli, ExperimentIsByteIdenticalAcrossWorkers) {
  const std::string base = "experiment --preset inside --n-list 1000,2000,4000 --replicates 10 --seed 11 ";
  ASSERT_EQ(run(base + "--workers 1 --out-dir " + path("w1")), 0);
  ASSERT_EQ(run(base + "--workers 4 --out-dir " + path("w4")), 0);
  EXPECT_EQ(slurp("w1/replicates.csv"), slurp("w4/replicates.csv"));
  EXPECT_EQ(slurp("w1/summary.json"), slurp("w4/summary.json"));
  const auto summary = nlohmann::json::parse(slurp("w1/summary.json"));
  EXPECT_EQ(summary["sizes"].size(), 3u);
  EXPECT_TRUE(summary.contains("median_cmax_slope"));
}

TEST_F(Cli, ExperimentRejectsBadSizes) {
  EXPECT_EQ(run("experiment --n-list 2000,1000 --seed 1 --out-dir " + path("x")), 2);
  EXPECT_EQ(run("experiment --n-list 10x --seed 1 --out-dir " + path("x")), 2);
}

TEST_F(Cli, OracleChecks) {
  write("star.txt", "1\n1\n1\n3\n");
  ASSERT_EQ(run("oracle --check expectation --start 3 --seed 1 --degrees " + path("star.txt")), 0);
  auto j = stdout_json();
  EXPECT_EQ(j["mean"], "-7/5");
  EXPECT_EQ(j["second_moment"], "11/5");
  ASSERT_EQ(run("oracle --check pairjoin --degrees " + path("star.txt")), 0);
  j = stdout_json();
  EXPECT_EQ(j["matchings"], 15);
  EXPECT_EQ(j["single_pair_probability"], "1/5");
  ASSERT_EQ(run("oracle --check uniformity --samples 20000 --seed 2 --degrees " + path("star.txt")), 0);
  EXPECT_EQ(stdout_json()["categories"], 15);
  write("big.txt", "7\n7\n");
  EXPECT_EQ(run("oracle --check pairjoin --degrees " + path("big.txt")), 2);
}

}  // namespace
