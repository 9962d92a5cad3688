#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace clj;
using namespace clj::testing;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
};

fs::path case_dir(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / "clj_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

CliRun run_cli(const std::string &args, const fs::path &dir) {
  const fs::path log = dir / "log.txt";
  const std::string cmd = std::string("\"") + CLJ_CLI + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string config(const std::string &name) {
  return std::string(CLJ_CONFIG_DIR) + "/" + name;
}

} // namespace

TEST(Cli, ValidateDefaultSucceeds) {
  const auto d = case_dir("validate_ok");
  const CliRun r = run_cli("validate --config " + config("default.json") + " --out " + d.string(), d);
  EXPECT_EQ(r.code, 0) << r.out;
  std::ifstream in(d / "validation.json");
  const json j = json::parse(in);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, ValidateConvexSecondNeighbourFails) {
  const auto d = case_dir("validate_fail");
  const CliRun r = run_cli(
      "validate --config " + config("convex_second_neighbour.json") + " --out " + d.string(), d);
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_NE(r.out.find("witness_t="), std::string::npos) << r.out;
  std::ifstream in(d / "validation.json");
  const json j = json::parse(in);
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["assumption"].get<std::string>(), "3-snn-concavity");
}

TEST(Cli, MalformedConfigIsInputError) {
  const auto d = case_dir("malformed");
  const fs::path bad = d / "bad.json";
  std::ofstream(bad) << "{\"model\": {\"builtin\": ";
  const CliRun r = run_cli("validate --config " + bad.string() + " --out " + d.string(), d);
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("input error"), std::string::npos) << r.out;
}

TEST(Cli, MissingConfigAndBadFlagsAreInputErrors) {
  const auto d = case_dir("flags");
  EXPECT_EQ(run_cli("validate --config " + (d / "nope.json").string(), d).code, 2);
  EXPECT_EQ(run_cli("validate", d).code, 2);
  EXPECT_EQ(run_cli("frobnicate --config x", d).code, 2);
  EXPECT_EQ(run_cli("discrete --config " + config("default.json") + " --tol -1", d).code, 2);
}

TEST(Cli, UnreachableToleranceIsNonConvergence) {
  const auto d = case_dir("noconv");
  const CliRun r = run_cli("discrete --config " + config("default.json") + " --tol 1e-300 --out " +
                            d.string(), d);
  EXPECT_EQ(r.code, 3) << r.out;
  std::ifstream in(d / "solve.json");
  EXPECT_FALSE(json::parse(in)["converged"].get<bool>());
}

TEST(Cli, DiscreteContinuumAndCellArtefacts) {
  const auto d = case_dir("artefacts");
  for (const char *sub : {"continuum", "discrete", "cell"})
    EXPECT_EQ(run_cli(std::string(sub) + " --config " + config("default.json") + " --out " +
                          d.string(), d).code, 0) << sub;
  for (const char *f : {"continuum.csv", "continuum.json", "deformation.csv", "solve.json",
                        "cell.csv", "cell.json"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  const ExperimentSpec spec = load_spec(config("default.json"));
  const ChainConfig cfg = spec.chain();
  const Deformation y = read_deformation_csv((d / "deformation.csv").string(), cfg);
  std::ifstream in(d / "solve.json");
  const json j = json::parse(in);
  const double stored = j["energy"].get<double>();
  EXPECT_LE(std::abs(F_eps(cfg, y) - stored), 1e-12 * std::abs(stored));
}

TEST(Cli, NoDefectScanAndDecay) {
  const auto d = case_dir("no_defect");
  const std::string cfg = config("no_defect.json");
  EXPECT_EQ(run_cli("gamma-scan --config " + cfg + " --out " + d.string(), d).code, 0);
  const CsvTable t = read_csv((d / "gamma_scan.csv").string());
  EXPECT_EQ(t.header, (std::vector<std::string>{"N", "eps", "F_eps_min", "F0", "first_order_est",
                                                "cell_energy", "gap0", "gap1"}));
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto &row : t.rows) EXPECT_NEAR(row[t.column("first_order_est")], 0.0, 1e-8);
  EXPECT_EQ(run_cli("decay --config " + cfg + " --out " + d.string(), d).code, 0);
  const CsvTable p = read_csv((d / "decay_profile.csv").string());
  for (const auto &row : p.rows) EXPECT_EQ(row[p.column("r_i")], 0.0);
  EXPECT_TRUE(fs::exists(d / "decay.json"));
}

TEST(Cli, RunsAreDeterministic) {
  const auto a = case_dir("det_a"), b = case_dir("det_b");
  for (const auto &d : {a, b})
    ASSERT_EQ(run_cli("cell --config " + config("default.json") + " --out " + d.string(), d).code, 0);
  auto slurp = [](const fs::path &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(a / "cell.csv"), slurp(b / "cell.csv"));
  EXPECT_EQ(slurp(a / "cell.json"), slurp(b / "cell.json"));
}
