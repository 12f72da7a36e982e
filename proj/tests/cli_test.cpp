#include "onehop/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "onehop/experiments.hpp"
#include "onehop/instance_io.hpp"

namespace fs = std::filesystem;
using namespace onehop;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "onehop");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("onehop_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kTwoPools = R"({"pools": [{"kind": "constant_product", "reserve_x": 100, "reserve_y": 100},
                                      {"kind": "constant_product", "reserve_x": 100, "reserve_y": 100}],
                            "amount_in": 100})";

}  // namespace

TEST_F(CliTest, SolveTwoIdenticalPools) {
  const auto r = run_cli({"solve", write("two.json", kTwoPools), "--with-oracle"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("termination: converged"), std::string::npos);
  EXPECT_NE(r.out.find("allocation: 50 50"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("oracle_objective:"), std::string::npos);
  EXPECT_NE(r.out.find("relative_optimality_gap:"), std::string::npos);
}

TEST_F(CliTest, NegativeReserveIsInputError) {
  const auto r = run_cli({"solve", write("bad.json", R"({"pools": [{"kind": "constant_product", "reserve_x": -5,
                                                                     "reserve_y": 100}], "amount_in": 1})")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("reserve_x"), std::string::npos) << r.err;
}

TEST_F(CliTest, MalformedJsonIsInputError) {
  const auto r = run_cli({"solve", write("broken.json", "{\"pools\": [")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
}

TEST_F(CliTest, SolveLargestScaleInstance) {
  const auto file = write("s1000.json", instance_to_json(build_instance(1000)).dump());
  const auto r = run_cli({"solve", file, "--trace", path("trace.csv"), "--bounds", path("bounds.csv")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("rounds: "), std::string::npos);
  EXPECT_EQ(slurp(path("trace.csv")).rfind("round,donor,receiver,", 0), 0u);
  std::istringstream bounds(slurp(path("bounds.csv")));
  std::string line;
  std::getline(bounds, line);
  int rows = 0;
  while (std::getline(bounds, line)) {
    std::vector<std::string> cols;
    std::istringstream fields(line);
    for (std::string c; std::getline(fields, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 12u);
    // lemma3_pass, lemma4_pass, rate_pass
    for (int k : {5, 7, 9}) EXPECT_NE(cols[k], "0") << line;
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(CliTest, RoundCapGivesExitTwo) {
  const auto file = write("s10.json", instance_to_json(build_instance(10)).dump());
  EXPECT_EQ(run_cli({"solve", file, "--max-rounds", "2"}).code, cli::kNotConverged);
}

TEST_F(CliTest, BadFlagValuesAreInputErrors) {
  const auto file = write("two.json", kTwoPools);
  EXPECT_EQ(run_cli({"solve", file, "--epsilon", "-1"}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"solve", file, "--init", "sideways"}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"solve", file, "--trace", path("missing/dir/t.csv")}).code, cli::kInputError);
  EXPECT_EQ(run_cli({}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kInputError);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, Table1WritesEightRows) {
  const auto r = run_cli({"table1", "--csv", path("t1.csv")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(slurp(path("t1.csv")));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 9);
  EXPECT_NE(r.out.find("1003"), std::string::npos);
}

TEST_F(CliTest, CheckSeededBatch) {
  const auto r = run_cli({"check", "--seed", "42", "--instances", "100"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}

TEST_F(CliTest, CheckRejectsZeroInstances) {
  EXPECT_EQ(run_cli({"check", "--instances", "0"}).code, cli::kInputError);
}

TEST_F(CliTest, CheckSinglePoolInstancesPassVacuously) {
  const auto r = run_cli({"check", "--seed", "7", "--instances", "5", "--min-pools", "1", "--max-pools", "1"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("single-pool instances: 5"), std::string::npos) << r.out;
}

TEST_F(CliTest, RepeatedRunsWriteIdenticalCsv) {
  const auto file = write("s100.json", instance_to_json(build_instance(100)).dump());
  for (const char* tag : {"a", "b"}) {
    const std::string t = tag;
    ASSERT_EQ(run_cli({"solve", file, "--trace", path("trace_" + t), "--bounds", path("bounds_" + t)}).code, 0);
    ASSERT_EQ(run_cli({"table1", "--csv", path("table_" + t)}).code, 0);
    ASSERT_EQ(run_cli({"check", "--instances", "20", "--bounds", path("check_" + t)}).code, 0);
  }
  for (const char* name : {"trace_", "bounds_", "table_", "check_"}) {
    const std::string n = name;
    const auto a = slurp(path(n + "a"));
    EXPECT_FALSE(a.empty()) << n;
    EXPECT_EQ(a, slurp(path(n + "b"))) << n;
  }
}
