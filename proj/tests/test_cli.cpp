#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cstress/scenario.hpp"

using namespace cstress;
namespace fs = std::filesystem;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "cfg.ini");
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ScenarioConfig scenario_file(const std::string& name) {
  return load_config(std::string(CSTRESS_SCENARIO_DIR) + "/" + name);
}

double result(const ScenarioResult& r, const std::string& key) { return r.report["results"][key].get<double>(); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSTRESS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cstress_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ErrorsCarryPathAndLine) {
  EXPECT_EQ(config_error("scenario = solve\n\n[fields]\nu = [x, y\n").rfind("cfg.ini:4:", 0), 0u);
  EXPECT_EQ(config_error("scenario = compare-bc\nbogus = 3\n").rfind("cfg.ini:2:", 0), 0u);
  EXPECT_EQ(config_error("scenario = flying\n").rfind("cfg.ini:1:", 0), 0u);
  EXPECT_EQ(config_error("scenario = solve\n[nowhere]\n").rfind("cfg.ini:2:", 0), 0u);
  EXPECT_EQ(config_error("scenario = solve\n[domain]\nkind = box\nkind = ball\n").rfind("cfg.ini:4:", 0), 0u);
  EXPECT_EQ(config_error("scenario = solve\n[domain]\nextents = 1 2\n").rfind("cfg.ini:3:", 0), 0u);
  EXPECT_EQ(config_error("scenario = solve\nthis line has no equals sign\n").rfind("cfg.ini:2:", 0), 0u);
  EXPECT_NE(config_error("[domain]\nkind = box\n").find("scenario"), std::string::npos);
}

TEST(Config, DegreeCapIsEnforced) {
  EXPECT_NE(config_error("scenario = compare-bc\n[fields]\nu = random:7\n"), "");
  EXPECT_NE(config_error("scenario = compare-bc\n[fields]\nu = [x^7, 0, 0]\n"), "");
  EXPECT_EQ(config_error("scenario = compare-bc\n[fields]\nu = random:6\n"), "");
  EXPECT_NE(config_error("scenario = solve\n[solver]\ndegree = 9\n"), "");
}

TEST(Config, MaterialAndScenarioRequirements) {
  EXPECT_NE(config_error("scenario = solve\n[material]\nmu = -1\n"), "");
  EXPECT_NE(config_error("scenario = patch-test\n[patch]\nA = 0 1 0 0 0 0 0 0 0\n"), "");
  // a tolerance key the scenario never checks is caught when it runs
  const ScenarioConfig unused = parse("scenario = patch-test\n[tolerance]\nnonsense = 1\n");
  EXPECT_THROW(run_scenario(unused), ConfigError);
}

TEST(Config, ParsesAllSections) {
  const ScenarioConfig c = parse(
      "# comment\nscenario = solve\nseed = 9\n[domain]\nkind = ball\nradius = 2\ndirichlet = cap:0.8\n"
      "[material]\nmu = 2\nlambda = 1\nalpha1 = 0.5\nalpha2 = 0\n[fields]\nu = random:2\nf = manufactured\n"
      "[solver]\ndegree = 2\nflavor = mt\n[output]\ndir = here\ntractions = true\n[tolerance]\nrecovery_error = 1e-5\n");
  EXPECT_EQ(c.scenario, ScenarioKind::kSolve);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.domain.kind, DomainKind::kBall);
  EXPECT_DOUBLE_EQ(c.domain.radius, 2.0);
  EXPECT_EQ(c.domain.dirichlet, std::vector<std::string>{"cap:0.8"});
  EXPECT_DOUBLE_EQ(c.material.alpha1, 0.5);
  EXPECT_EQ(c.basis_degree, 2);
  EXPECT_EQ(c.flavor, TractionFlavor::kMindlinTiersten);
  EXPECT_EQ(c.out_dir, "here");
  EXPECT_TRUE(c.dump_tractions);
  EXPECT_DOUBLE_EQ(c.tolerance.at("recovery_error"), 1e-5);
}

TEST(Scenario, CompareBcWitnessOnTheUnitBox) {
  // Hand values: <sigma, grad du> = 3y^2 (xz + 2x) integrates to 5/4 and the
  // curvature pairing vanishes for this pair.
  const ScenarioResult r = run_scenario(scenario_file("compare_bc_box_witness.ini"));
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(result(r, "internal"), 1.25, 1e-13);
  EXPECT_LT(result(r, "residual_corrected"), 1e-8);
  EXPECT_NEAR(result(r, "discrepancy"), -3.0, 1e-12);
  EXPECT_NEAR(result(r, "missing_work"), 0.0, 1e-13);
  EXPECT_NEAR(result(r, "edge_work"), -3.0, 1e-12);
  EXPECT_FALSE(r.tractions.empty());
}

TEST(Scenario, MissingTermMapShowsNonzeroTermOnTheBox) {
  const ScenarioResult r = run_scenario(scenario_file("missing_term_box.ini"));
  EXPECT_TRUE(r.pass());
  EXPECT_NEAR(r.report["results"]["max_missing"].get<double>(), 0.625, 1e-12);
}

TEST(Scenario, IdentitiesWithSeed42) {
  ScenarioConfig c = parse("scenario = verify-identities\nseed = 42\ncases = 20\n");
  const ScenarioResult r = run_scenario(c);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.report["seed"].get<std::uint64_t>(), 42u);
  EXPECT_GE(r.checks.size(), 8u);
}

TEST(Scenario, PatchTestWithPureShear) {
  const ScenarioResult r = run_scenario(scenario_file("patch_shear.ini"));
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks) EXPECT_LT(c.actual, 1e-9) << c.name;
}

TEST(Scenario, SolveScenarios) {
  for (const char* name : {"solve_corrected.ini", "solve_mt.ini", "solve_clamped_zero.ini"}) {
    const ScenarioResult r = run_scenario(scenario_file(name));
    EXPECT_TRUE(r.pass()) << name;
  }
}

TEST(Scenario, FailuresAreListedAsTriples) {
  const ScenarioResult r = run_scenario(scenario_file("compare_bc_box_witness.ini"), 1e-30);
  EXPECT_FALSE(r.pass());
  ASSERT_FALSE(r.failures().empty());
  const auto& failures = r.report["failures"];
  ASSERT_EQ(failures.size(), r.failures().size());
  for (const auto& f : failures) {
    EXPECT_TRUE(f.contains("expected"));
    EXPECT_TRUE(f.contains("actual"));
    EXPECT_TRUE(f.contains("tolerance"));
  }
  // lower bounds do not scale
  for (const auto& c : r.checks)
    if (c.lower_bound) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Scenario, DeterministicForFixedSeed) {
  ScenarioConfig c = scenario_file("compare_bc_box_random.ini");
  const std::string a = summary_body(run_scenario(c));
  const std::string b = summary_body(run_scenario(c));
  EXPECT_EQ(a, b);
  c.seed += 1;
  EXPECT_NE(a, summary_body(run_scenario(c)));
}

TEST(Scenario, WritesOutputFiles) {
  const ScenarioConfig c = scenario_file("compare_bc_box_witness.ini");
  const ScenarioResult r = run_scenario(c);
  const fs::path dir = scratch("outputs");
  write_outputs(r, c, dir.string());
  ASSERT_TRUE(fs::exists(dir / "report.json"));
  ASSERT_TRUE(fs::exists(dir / "summary.csv"));
  ASSERT_TRUE(fs::exists(dir / "tractions.csv"));
  std::ifstream summary(dir / "summary.csv");
  std::string first, second;
  std::getline(summary, first);
  std::getline(summary, second);
  EXPECT_EQ(first.rfind("# generated ", 0), 0u);
  EXPECT_EQ(second, "name,value");
  std::ifstream tractions(dir / "tractions.csv");
  std::getline(tractions, first);
  EXPECT_EQ(first, "patch,flavor,x,y,z,nx,ny,nz,tx,ty,tz,gx,gy,gz");
  std::stringstream body;
  body << summary.rdbuf();
  EXPECT_EQ(second + "\n" + body.str(), summary_body(r));
}

TEST(Binary, ExitCodes) {
  const std::string dir = scratch("cli").string();
  const std::string witness = std::string(CSTRESS_SCENARIO_DIR) + "/compare_bc_box_witness.ini";
  EXPECT_EQ(run_cli("run " + witness + " --out " + dir), 0);
  EXPECT_TRUE(fs::exists(fs::path(dir) / "report.json"));
  EXPECT_EQ(run_cli("run " + witness + " --out " + dir + " --tol-scale 1e-30"), 1);
  const fs::path bad = scratch("bad.ini");
  std::ofstream(bad) << "scenario = compare-bc\n[fields]\nu = [x^,0,0]\n";
  EXPECT_EQ(run_cli("run " + bad.string() + " --out " + dir), 2);
  EXPECT_NE(run_cli("run"), 0);
}

TEST(Binary, SeedOverrideIsRecorded) {
  const std::string dir = scratch("seed").string();
  const std::string cfg = std::string(CSTRESS_SCENARIO_DIR) + "/compare_bc_box_random.ini";
  ASSERT_EQ(run_cli("run " + cfg + " --seed 77 --out " + dir), 0);
  std::ifstream in(fs::path(dir) / "report.json");
  const auto rep = nlohmann::json::parse(in);
  EXPECT_EQ(rep["seed"].get<std::uint64_t>(), 77u);
}
