#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fatso/cli.hpp"

namespace fatso {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

// Every numeric field of a TSV body, in order.
std::vector<double> numbers(const std::string& tsv) {
  std::vector<double> v;
  const auto lines = split(tsv, '\n');
  for (std::size_t l = 1; l < lines.size(); ++l) {
    for (const auto& field : split(lines[l], '\t')) {
      for (const auto& x : split(field, ',')) {
        if (!x.empty()) v.push_back(std::stod(x));
      }
    }
  }
  return v;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LE(std::abs(a[i] - b[i]), tol * (1.0 + std::abs(a[i]))) << "field " << i;
  }
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fatso_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    const auto sim = invoke({"simulate", "--n", "30", "--p", "4", "--beta", "1,-0.5,0,0.8",
                             "--noise-sd", "0.3", "--seed", "5", "--out", data().string()});
    ASSERT_EQ(sim.code, 0) << sim.err;
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path data() const { return dir_ / "d.csv"; }
  fs::path dir_;
};

TEST_F(CliTest, FitHappyPath) {
  const auto r = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2",
                         "--lambda", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split(r.out, '\n');
  ASSERT_GE(lines.size(), 2u);
  EXPECT_EQ(lines[0].rfind("beta_raw\tintercept\tactive_set\tobjective", 0), 0u);
  const auto fields = split(lines[1], '\t');
  EXPECT_EQ(split(fields[0], ',').size(), 4u);
}

TEST_F(CliTest, RejectsSmallM) {
  const auto r = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "0.5",
                         "--lambda", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("m must exceed 1"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"bogus"}).code, 1);
  EXPECT_EQ(invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2"}).code, 1);
  EXPECT_EQ(invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2", "--rho",
                    "3", "--lambda", "1"})
                .code,
            1);
  EXPECT_EQ(invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2", "--lambda",
                    "1", "--k", "1", "--sigma", "1"})
                .code,
            1);
  EXPECT_EQ(invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2", "--lambda",
                    "abc"})
                .code,
            1);
}

TEST_F(CliTest, RhoEquivalentToM) {
  const double rho = 2.7;
  const double m = std::sqrt(2 * rho * rho - 1);
  std::ostringstream ms;
  ms.precision(17);
  ms << m;
  const auto a = invoke({"fit", "--data", data().string(), "--response", "y", "--rho", "2.7",
                         "--lambda", "5"});
  const auto b = invoke({"fit", "--data", data().string(), "--response", "y", "--m", ms.str(),
                         "--lambda", "5"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  expect_close(numbers(a.out), numbers(b.out), 1e-10);
}

TEST_F(CliTest, KSigmaEquivalentToLambda) {
  for (const std::string penalty : {"fatso", "lasso"}) {
    const auto k = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3",
                           "--penalty", penalty, "--k", "2", "--sigma", "1"});
    const auto l = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3",
                           "--penalty", penalty, "--lambda", "2"});
    ASSERT_EQ(k.code, 0) << k.err;
    ASSERT_EQ(l.code, 0) << l.err;
    expect_close(numbers(k.out), numbers(l.out), 1e-10);

    // With sigma != 1 the same posterior is --lambda k / sigma^2 under a
    // likelihood with noise variance sigma^2; coefficients agree.
    const auto k2 = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3",
                            "--penalty", penalty, "--k", "2", "--sigma", "0.5"});
    const auto l2 = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3",
                            "--penalty", penalty, "--lambda", "8", "--sigma2", "0.25"});
    ASSERT_EQ(k2.code, 0) << k2.err;
    const auto bk = split(split(split(k2.out, '\n')[1], '\t')[0], ',');
    const auto bl = split(split(split(l2.out, '\n')[1], '\t')[0], ',');
    ASSERT_EQ(bk.size(), bl.size());
    for (std::size_t i = 0; i < bk.size(); ++i) {
      EXPECT_NEAR(std::stod(bk[i]), std::stod(bl[i]), 1e-8);
    }
  }
}

TEST_F(CliTest, KSigmaIsSigmaInvariant) {
  const auto a = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3", "--k",
                         "2", "--sigma", "0.1"});
  const auto b = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "3", "--k",
                         "2", "--sigma", "10"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const auto cfg = dir_ / "run.cfg";
  std::ofstream(cfg) << "# fit settings\ndata = " << data().string()
                     << "\nresponse = y\nm = 2\nlambda = 30\n";
  const auto direct = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2",
                              "--lambda", "30"});
  const auto viaconfig = invoke({"fit", "--config", cfg.string()});
  ASSERT_EQ(viaconfig.code, 0) << viaconfig.err;
  EXPECT_EQ(direct.out, viaconfig.out);
  const auto overridden = invoke({"fit", "--config", cfg.string(), "--lambda", "0.01"});
  const auto explicit_small = invoke({"fit", "--data", data().string(), "--response", "y", "--m",
                                      "2", "--lambda", "0.01"});
  EXPECT_EQ(overridden.out, explicit_small.out);
  EXPECT_NE(overridden.out, direct.out);

  std::ofstream(dir_ / "bad.cfg") << "this line has no equals sign\n";
  EXPECT_EQ(invoke({"fit", "--config", (dir_ / "bad.cfg").string()}).code, 1);
}

TEST_F(CliTest, OutFileReceivesResult) {
  const auto target = dir_ / "fit.tsv";
  const auto r = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2",
                         "--lambda", "1", "--out", target.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(target);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("beta_raw", 0), 0u);
}

TEST_F(CliTest, DataErrorsExitTwo) {
  const auto missing = invoke({"fit", "--data", (dir_ / "nope.csv").string(), "--response", "y",
                               "--m", "2", "--lambda", "1"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_TRUE(missing.out.empty());
  EXPECT_EQ(invoke({"fit", "--data", data().string(), "--response", "zzz", "--m", "2",
                    "--lambda", "1"})
                .code,
            2);
  EXPECT_EQ(invoke({"table2", "--data", (dir_ / "nope.csv").string()}).code, 2);
}

TEST_F(CliTest, ConvergenceFailureExitsThree) {
  const auto r = invoke({"fit", "--data", data().string(), "--response", "y", "--m", "2",
                         "--lambda", "0.001", "--max-sweeps", "1"});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("did not converge"), std::string::npos);
}

TEST_F(CliTest, SweepWithSplit) {
  const auto r = invoke({"sweep", "--data", data().string(), "--response", "y", "--m-grid",
                         "5,2", "--lambda-grid", "0.1,1", "--train", "20", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split(r.out, '\n');
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0].rfind("m\trho\tlambda\tactive_set\tbeta_hat\tprediction_mse", 0), 0u);
  for (std::size_t i = 1; i <= 4; ++i) EXPECT_FALSE(split(lines[i], '\t')[5].empty());
  EXPECT_EQ(r.out, invoke({"sweep", "--data", data().string(), "--response", "y", "--m-grid",
                           "5,2", "--lambda-grid", "0.1,1", "--train", "20", "--seed", "3"})
                       .out);
}

TEST_F(CliTest, DiagnoseDefaultsSigma2WithNote) {
  const auto r = invoke({"diagnose", "--data", data().string(), "--response", "y"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("residual variance"), std::string::npos);
  const auto lines = split(r.out, '\n');
  EXPECT_EQ(lines[0], "variable\tmu\tr_x1\tr_x2\tr_x3\tr_x4");
  EXPECT_EQ(split(lines[1], '\t')[2], "1");
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const auto a = invoke({"simulate", "--n", "5", "--p", "3", "--beta", "1", "--noise-sd", "0.1",
                         "--seed", "2"});
  const auto b = invoke({"simulate", "--n", "5", "--p", "3", "--beta", "1", "--noise-sd", "0.1",
                         "--seed", "2"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(split(a.out, '\n')[0], "x1,x2,x3,y");
  EXPECT_EQ(invoke({"simulate", "--n", "5", "--p", "1", "--beta", "1,2", "--noise-sd", "0.1"}).code,
            1);
}

TEST_F(CliTest, CrossValidation) {
  const auto r = invoke({"cv", "--data", data().string(), "--response", "y", "--m", "2",
                         "--lambda-grid", "0.01,100", "--folds", "3", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split(r.out, '\n');
  EXPECT_EQ(lines[0], "lambda\tmean_mse\tselected");
  int selected = 0;
  for (std::size_t i = 1; i < lines.size(); ++i)
    if (!lines[i].empty()) selected += split(lines[i], '\t')[2] == "yes";
  EXPECT_EQ(selected, 1);
}

TEST_F(CliTest, Table1Runs) {
  const auto r = invoke({"table1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(split(r.out, '\n').size(), 9u + 1u);
  EXPECT_NE(r.out.find("reference"), std::string::npos);
}

}  // namespace
}  // namespace fatso
