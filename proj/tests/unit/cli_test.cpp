#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "zifit/error.hpp"
#include "zifit_cli/cli.hpp"

namespace {

namespace fs = std::filesystem;
using namespace zifit;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("zifit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

TEST(ParseObservations, SeparatorsHeaderAndComments) {
  const auto obs = cli::parse_observations("count\n1, 2\t3\n# note\n\n4 5,6\n");
  EXPECT_EQ(obs.values, (std::vector<double>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(obs.lines, (std::vector<std::size_t>{2, 2, 2, 5, 5, 5}));
}

TEST(ParseObservations, BadTokenNamesItsLine) {
  try {
    cli::parse_observations("1\n2\n3 x\n");
    FAIL() << "expected an input error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ParseObservations, ChecksumIsFnv1aOfRawBytes) {
  EXPECT_EQ(cli::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(cli::parse_observations("1 2\n").checksum, cli::fnv1a64("1 2\n"));
}

TEST_F(CliFiles, EmptyFileIsInputError) {
  const auto r = run_cli({"fit", write("empty.txt", ""), "-m", "ph"});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("no observations"), std::string::npos) << r.err;
}

TEST_F(CliFiles, SupportViolationNamesValue) {
  const auto r = run_cli({"fit", write("frac.txt", "0\n1.5\n"), "-m", "ph"});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("1.5"), std::string::npos) << r.err;
}

TEST_F(CliFiles, UnknownModelAndBadFlagsAreInputErrors) {
  const auto data = write("d.txt", "0 1 2\n");
  EXPECT_EQ(run_cli({"fit", data, "-m", "zin"}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({"fit", data, "--no-such-flag"}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({"fit", path("missing.txt"), "-m", "ph"}).code, cli::kExitInput);
}

TEST_F(CliFiles, SimulateThenFitGeometricHurdle) {
  const auto csv = path("geo.csv");
  ASSERT_EQ(run_cli({"simulate", "--family", "geometric", "--kind", "hurdle", "--phi", "0.3", "--p", "0.3", "-n",
                     "2000", "--seed", "11", "-o", csv})
                .code,
            cli::kExitOk);
  const auto json = path("fit.json");
  const auto r = run_cli({"fit", csv, "-m", "geomh", "--json", json});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto report = nlohmann::json::parse(slurp(json));
  const auto& est = report["fit"]["params"];
  ASSERT_TRUE(est.is_object()) << report["fit"].dump();
  EXPECT_NEAR(est["phi"].get<double>(), 0.3, 0.03);
  EXPECT_NEAR(est["p"].get<double>(), 0.3, 0.03);
  EXPECT_TRUE(report.contains("zero_alteration"));
}

TEST_F(CliFiles, BoundaryFitReportsUnavailableIntervals) {
  // No zeros puts the hurdle phi on the boundary, where no Wald interval exists.
  const auto r = run_cli({"fit", write("d.txt", "1 2 3 2 1 4\n"), "-m", "ph", "--json", path("b.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto report = nlohmann::json::parse(slurp(path("b.json")));
  EXPECT_FALSE(report["intervals"]["available"].get<bool>());
  EXPECT_TRUE(report["intervals"]["rows"][0]["lower"].is_null());
}

TEST_F(CliFiles, SimulatedZeroFractionAndDeterminism) {
  const std::vector<std::string> args{"simulate", "--family", "nb",  "--kind", "zi",   "--phi", "0.4",
                                      "--r",      "10",       "--p", "0.2",    "-n",   "1000",  "--seed",
                                      "12"};
  auto a = args, b = args;
  a.insert(a.end(), {"-o", path("a.csv")});
  b.insert(b.end(), {"-o", path("b.csv")});
  ASSERT_EQ(run_cli(a).code, cli::kExitOk);
  ASSERT_EQ(run_cli(b).code, cli::kExitOk);
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(text, slurp(path("b.csv")));
  const auto obs = cli::parse_observations(text);
  ASSERT_EQ(obs.values.size(), 1000u);
  const double zeros = static_cast<double>(std::count(obs.values.begin(), obs.values.end(), 0.0));
  EXPECT_NEAR(zeros / 1000.0, 0.4, 0.05);
}

TEST_F(CliFiles, ContinuousZeroInflatedEqualsHurdle) {
  const auto data = write("c.txt", "0 0 1.2 0.7 3.1 0 2.2 0.4\n");
  const auto zi = run_cli({"fit", data, "--family", "normal", "--kind", "zi", "--json", path("zi.json")});
  const auto za = run_cli({"fit", data, "--family", "normal", "--kind", "hurdle", "--json", path("za.json")});
  ASSERT_EQ(zi.code, cli::kExitOk) << zi.err;
  ASSERT_EQ(za.code, cli::kExitOk) << za.err;
  EXPECT_EQ(slurp(path("zi.json")), slurp(path("za.json")));
}

TEST_F(CliFiles, KsPValueGranularity) {
  const auto csv = path("zip.csv");
  ASSERT_EQ(run_cli({"simulate", "--family", "poisson", "--kind", "zi", "--phi", "0.3", "--lambda", "10", "-n",
                     "200", "--seed", "13", "-o", csv})
                .code,
            cli::kExitOk);
  const auto r = run_cli({"ks", csv, "-m", "zip", "-B", "40", "--seed", "14", "--json", path("ks.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto report = nlohmann::json::parse(slurp(path("ks.json")));
  const double p = report["p_value"].get<double>();
  EXPECT_DOUBLE_EQ(p * 40.0, std::round(p * 40.0));
}

TEST_F(CliFiles, LrtSelfComparison) {
  const auto data = write("d.txt", "0 0 0 1 2 3 1 0 4 2 0 1 5 0 2\n");
  const auto r = run_cli({"lrt", data, "--h0", "zip", "--h1", "zip", "-B", "20", "--seed", "15", "--json",
                          path("lrt.json")});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_GE(nlohmann::json::parse(slurp(path("lrt.json")))["p_value"].get<double>(), 0.05);
}

TEST_F(CliFiles, SelectWithImpossibleThresholdIsStatisticalExit) {
  const auto data = write("d.txt", "0 0 0 1 2 3 1 0 4 2 0 1 5 0 2\n");
  const auto r = run_cli({"select", data, "--candidates", "poisson", "zip", "--threshold", "1.0", "-B", "20",
                          "--seed", "16"});
  EXPECT_EQ(r.code, cli::kExitStatistical);
}

TEST_F(CliFiles, BenchPresetIsDeterministic) {
  const std::vector<std::string> args{"bench",    "table3-desk", "--replications", "2", "-B",
                                      "10",       "--sizes",     "30",             "--seed", "17"};
  auto a = args, b = args;
  a.insert(a.end(), {"--csv", path("a.csv")});
  b.insert(b.end(), {"--csv", path("b.csv"), "--threads", "2"});
  ASSERT_EQ(run_cli(a).code, cli::kExitOk);
  ASSERT_EQ(run_cli(b).code, cli::kExitOk);
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(text, slurp(path("b.csv")));
  EXPECT_EQ(text.rfind("study,label,n,value", 0), 0u);
}

TEST(Cli, BenchListNamesPresets) {
  const auto r = run_cli({"bench", "--list"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("table9-desk"), std::string::npos);
}

}  // namespace
