#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "dissipext_cli_test";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
  const std::string cmd = "cd '" + kWork.string() + "' && '" DISSIPEXT_CLI "' " + args + " > '" + stdout_file +
                          "' 2> '" + (kWork / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override { fs::create_directories(kWork); }
};

}  // namespace

TEST_F(Cli, ConstructMatchesChiOracle) {
  ASSERT_EQ(run("construct --lambda -1 --out-prefix P"), 0);
  const json r = read_json(kWork / "P.report.json");
  const double re = r["h"][0], im = r["h"][1];
  const double hr = -1.05314549855293840772136278189, hi = 0.422525106428462065757654438402;
  EXPECT_LT(std::hypot(re - hr, im - hi), 1e-8 * std::hypot(hr, hi));
  EXPECT_TRUE(r["passed"].get<bool>());
  EXPECT_TRUE(fs::exists(kWork / "P.eta.csv"));
  EXPECT_TRUE(fs::exists(kWork / "P.k.csv"));
  EXPECT_EQ(slurp(kWork / "P.eta.plot.csv").substr(0, 12), "x,abs,re,im\n");
}

TEST_F(Cli, ConstructOutputRoundTripsThroughClassify) {
  ASSERT_EQ(run("construct --lambda -0.25 --out-prefix R"), 0);
  const json r = read_json(kWork / "R.report.json");
  char h[96];
  std::snprintf(h, sizeof h, "%.17g,%.17g", r["h"][0].get<double>(), r["h"][1].get<double>());
  const auto out = kWork / "classify.json";
  ASSERT_EQ(run(std::string("classify --h ") + h + " --k R.k.csv --candidate R.eta.csv", out.string()), 0);
  const json c = read_json(out);
  EXPECT_EQ(c["regime"], "CriticalDissipativeReducing");
  EXPECT_NEAR(c["eigenvalue"].get<double>(), -0.25, 1e-8);
}

TEST_F(Cli, ClassifySlackOne) {
  const auto out = kWork / "slack.json";
  ASSERT_EQ(run("classify --h 0,1 --k zero", out.string()), 0);
  const json c = read_json(out);
  EXPECT_EQ(c["regime"], "CnsNonCritical");
  EXPECT_EQ(c["slack"], 1.0);
}

TEST_F(Cli, VerifyAllPass) {
  const auto out = kWork / "verify.txt";
  EXPECT_EQ(run("verify", out.string()), 0);
  const std::string table = slurp(out);
  EXPECT_EQ(table.find("FAIL"), std::string::npos) << table;
}

TEST_F(Cli, InputErrorsExitOne) {
  std::ofstream(kWork / "bad.json") << "{\n  \"breakpoints\": [0, 1],\n  \"values\": [[0, 1]\n}\n";
  EXPECT_EQ(run("classify --potential bad.json --h 0,1"), 1);
  EXPECT_NE(slurp(kWork / "stderr.txt").find("bad.json:4:"), std::string::npos);
  EXPECT_EQ(run("construct --lambda 2"), 1);
  EXPECT_EQ(run("classify --h 1,zz"), 1);
  EXPECT_EQ(run("green --x0 1 --lambda 0,-1 --rhs missing.csv --h 0,0"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, TightToleranceIsCertificateFailure) {
  const std::string cmd = "cd '" + kWork.string() + "' && DISSIPEXT_TOL_SCALE=1e-9 '" DISSIPEXT_CLI
                          "' construct --lambda -1 --out-prefix T > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_TRUE(fs::exists(kWork / "T.report.json"));
}

TEST_F(Cli, OutputIsDeterministic) {
  ASSERT_EQ(run("example --xi 2 --out-prefix A"), 0);
  ASSERT_EQ(run("example --xi 2 --out-prefix B"), 0);
  EXPECT_EQ(slurp(kWork / "A.eta.csv"), slurp(kWork / "B.eta.csv"));
  EXPECT_EQ(slurp(kWork / "A.compare.json"), slurp(kWork / "B.compare.json"));
  EXPECT_TRUE(read_json(kWork / "A.compare.json")["passed"].get<bool>());
}
