#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "commands.hpp"

using namespace stagrav;
using namespace stagrav::cli;

namespace {

const std::string kScenarios = STAGRAV_SCENARIO_DIR;

Json schwarzschild_json() {
  std::ifstream in(kScenarios + "/schwarzschild.json");
  return Json::parse(in);
}

Json flat_matter_json() {
  return Json::parse(R"json({
    "chart": ["t", "x", "y", "z"],
    "parameters": {"E": 0.3, "k": 2},
    "tetrad": [["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]],
    "maxwell_potential": ["-E*x", "0", "cos(k*(t-x))/k", "0"],
    "spinor": {"components": ["cos(t)", "0", "0.1*x", "0", "sin(t)", "0", "0", "0.2*y"], "mass": 1, "charge": 0.5},
    "grid": {"t": 0, "x": {"min": -1, "max": 1, "count": 3}, "y": 0.5, "z": {"values": ["0", "1"]}}
  })json");
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string report_text(const CompiledScenario& s, const std::string& which, int threads) {
  std::ostringstream os;
  write_report(os, s, parse_groups(which), threads);
  return os.str();
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STAGRAV_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("stagrav_test_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Scenario, BundledFilesCompile) {
  const CompiledScenario s = compile(load_scenario(kScenarios + "/schwarzschild.json"));
  ASSERT_EQ(s.points.size(), 9u);
  EXPECT_DOUBLE_EQ(s.points[0][1], 10.0);
  EXPECT_DOUBLE_EQ(s.points[0][2], std::numbers::pi / 4);
  // Last coordinate fastest, so theta changes before r.
  EXPECT_DOUBLE_EQ(s.points[1][1], 10.0);
  EXPECT_DOUBLE_EQ(s.points[1][2], std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(s.points[3][1], 3.0);
  ASSERT_TRUE(s.source.integration);

  const CompiledScenario m = compile(load_scenario(kScenarios + "/minkowski.json"));
  ASSERT_EQ(m.points.size(), 6u);
  EXPECT_DOUBLE_EQ(m.points[0][1], -1.0);
  EXPECT_DOUBLE_EQ(m.points[1][3], 2.0);
  EXPECT_DOUBLE_EQ(m.points[2][1], 0.0);
  EXPECT_FALSE(m.source.integration);
}

TEST(Scenario, JsonRoundTripIsIdempotent) {
  for (const Json& j : {schwarzschild_json(), flat_matter_json()}) {
    const Json once = scenario_to_json(scenario_from_json(j));
    const Json twice = scenario_to_json(scenario_from_json(once));
    EXPECT_EQ(once.dump(), twice.dump());
  }
}

TEST(Scenario, ErrorsCarryFieldPaths) {
  Json j = schwarzschild_json();
  j["tetrad"][3][3] = "r*si n(theta)";
  try {
    compile(scenario_from_json(j));
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.path(), "tetrad[3][3]");
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'si'"), std::string::npos) << e.what();
  }

  Json extra = schwarzschild_json();
  extra["integration"]["bogus"] = 1;
  try {
    scenario_from_json(extra);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.path(), "integration.bogus");
  }

  Json missing = schwarzschild_json();
  missing.erase("tetrad");
  EXPECT_THROW(scenario_from_json(missing), ScenarioError);

  Json moving = schwarzschild_json();
  moving["grid"]["r"] = Json{{"min", "theta"}, {"max", 5}, {"count", 2}};
  EXPECT_THROW(compile(scenario_from_json(moving)), ScenarioError);

  EXPECT_THROW(load_scenario(kScenarios + "/does_not_exist.json"), ScenarioError);
}

TEST(Scenario, NumericExpressionsAreAccepted) {
  const CompiledScenario s = compile(scenario_from_json(flat_matter_json()));
  EXPECT_EQ(s.points.size(), 6u);
  EXPECT_TRUE(s.config.matter.A);
  EXPECT_TRUE(s.config.matter.psi);
  EXPECT_DOUBLE_EQ(s.config.matter.charge, 0.5);
}

TEST(Commands, FormatNumber) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.002), "0.002");
  EXPECT_EQ(format_number(-0.5), "-0.5");
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int n = 0; n < 1000; ++n) {
    const double v = std::pow(10.0, u(rng)) * (n % 2 ? -1 : 1);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Commands, ParallelMapKeepsOrderAndLowestError) {
  const auto squares = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < squares.size(); ++i) EXPECT_EQ(squares[i], static_cast<int>(i * i));
  try {
    parallel_map<int>(50, 4, [](std::size_t i) -> int {
      if (i == 7 || i == 31) throw std::runtime_error(std::to_string(i));
      return 0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(Commands, ParseGroups) {
  EXPECT_EQ(parse_groups("residuals,grav"), (std::vector<Group>{Group::kGrav, Group::kResiduals}));
  EXPECT_EQ(parse_groups("lagrangians,dirac,maxwell,interaction"),
            (std::vector<Group>{Group::kMaxwell, Group::kDirac, Group::kInteraction, Group::kLagrangians}));
  EXPECT_THROW(parse_groups("grav,gravity"), UsageError);
  EXPECT_THROW(parse_groups(""), UsageError);
}

TEST(Commands, ChecksPassOnBundledScenarios) {
  for (const char* name : {"/schwarzschild.json", "/minkowski.json"}) {
    const CheckReport r = run_checks(compile(load_scenario(kScenarios + name)), 2);
    EXPECT_TRUE(r.passed()) << name;
    EXPECT_FALSE(r.rows.empty());
  }
  const CheckReport matter = run_checks(compile(scenario_from_json(flat_matter_json())), 2);
  EXPECT_TRUE(matter.passed());
  std::set<std::string> names;
  for (const auto& row : matter.rows) names.insert(row.name);
  EXPECT_TRUE(names.count("maxwell.two_routes"));
  EXPECT_TRUE(names.count("dirac.symmetry"));
  EXPECT_TRUE(names.count("interaction.symmetry"));
}

TEST(Report, SchwarzschildGoldenRow) {
  const CompiledScenario s = compile(load_scenario(kScenarios + "/schwarzschild.json"));
  const auto rows = parse_csv(report_text(s, "grav", 1));
  ASSERT_EQ(rows.size(), 10u);
  const auto& header = rows[0];
  EXPECT_EQ(std::set<std::string>(header.begin(), header.end()).size(), header.size());
  EXPECT_EQ(header[0], "t");
  EXPECT_EQ(header[3], "phi");
  const auto& row = rows[1];
  EXPECT_EQ(row[column(header, "r")], "10");
  EXPECT_NEAR(std::stod(row[column(header, "t_12")]), -0.00894427190999916, 1e-15);
  EXPECT_NEAR(std::stod(row[column(header, "t_21")]), 0.0, 1e-18);
  EXPECT_NEAR(std::stod(row[column(header, "t_00")]), 1.25e-4, 1e-17);
}

TEST(Report, MinkowskiIsZero) {
  const CompiledScenario s = compile(load_scenario(kScenarios + "/minkowski.json"));
  const auto rows = parse_csv(report_text(s, "grav,residuals,lagrangians", 1));
  const auto& header = rows[0];
  for (std::size_t r = 1; r < rows.size(); ++r)
    for (std::size_t c = 4; c < header.size(); ++c) EXPECT_EQ(rows[r][c], "0") << header[c];
}

TEST(Report, HeaderFollowsRequestedGroups) {
  const CompiledScenario s = compile(scenario_from_json(flat_matter_json()));
  const auto header = report_header(s, parse_groups("interaction,maxwell,residuals,lagrangians,dirac"));
  EXPECT_EQ(std::set<std::string>(header.begin(), header.end()).size(), header.size());
  EXPECT_LT(column(header, "TM_00"), column(header, "TD_00"));
  EXPECT_LT(column(header, "TD_33"), column(header, "TMD_00"));
  EXPECT_LT(column(header, "TMD_33"), column(header, "res_route"));
  for (const char* name : {"res_dF", "res_maxwell", "res_dirac", "res_current", "L_g", "L_M", "L_D", "L_FD"})
    column(header, name);
}

TEST(Report, DeterministicAcrossThreadCounts) {
  const CompiledScenario s = compile(load_scenario(kScenarios + "/schwarzschild.json"));
  const std::string all = "grav,residuals,lagrangians";
  EXPECT_EQ(report_text(s, all, 1), report_text(s, all, 4));
  const CompiledScenario m = compile(scenario_from_json(flat_matter_json()));
  const std::string every = "grav,maxwell,dirac,interaction,residuals,lagrangians";
  EXPECT_EQ(report_text(m, every, 1), report_text(m, every, 3));
}

TEST(Report, MissingFieldsAreUsageErrors) {
  const CompiledScenario s = compile(load_scenario(kScenarios + "/schwarzschild.json"));
  std::ostringstream os;
  EXPECT_THROW(write_report(os, s, parse_groups("dirac"), 1), UsageError);
  EXPECT_THROW(write_report(os, s, parse_groups("maxwell"), 1), UsageError);
}

TEST(Integrate, BundledScenario) {
  const Json j = integrate(compile(load_scenario(kScenarios + "/schwarzschild.json")));
  EXPECT_NEAR(j["energy"].get<double>(), -1.4832588477222748, 1e-9);
  ASSERT_EQ(j["momentum"].size(), 3u);
  for (const auto& p : j["momentum"]) EXPECT_LT(std::abs(p.get<double>()), 1e-9);
  auto it = j.begin();
  EXPECT_EQ(it.key(), "energy");
  EXPECT_EQ((++it).key(), "momentum");
  EXPECT_THROW(integrate(compile(load_scenario(kScenarios + "/minkowski.json"))), ScenarioError);
}

TEST(Verify, Schwarzschild) {
  VerifyOptions o;
  o.points = 20;
  EXPECT_TRUE(verify_schwarzschild(1.0, 10.0, o).passed());
  o.integrate = false;
  EXPECT_TRUE(verify_schwarzschild(2.0, 4.5, o).passed());
  EXPECT_THROW(verify_schwarzschild(1.0, 2.0, o), RegionError);
  EXPECT_THROW(verify_schwarzschild(-1.0, 10.0, o), RegionError);
}

TEST(Binary, ExitCodes) {
  const std::string sch = kScenarios + "/schwarzschild.json";
  EXPECT_EQ(run_cli("check " + sch), 0);
  EXPECT_EQ(run_cli("--threads 2 report " + sch + " --which grav,residuals"), 0);
  EXPECT_EQ(run_cli("verify-schwarzschild --mass 1 --radius 10"), 0);
  EXPECT_EQ(run_cli("verify-schwarzschild --mass 1 --radius 2"), 2);
  EXPECT_EQ(run_cli("report " + sch + " --which nonsense"), 2);
  EXPECT_EQ(run_cli("integrate " + kScenarios + "/minkowski.json"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("--help"), 0);

  Json bad = schwarzschild_json();
  bad["tetrad"][3][3] = "r*si n(theta)";
  EXPECT_EQ(run_cli("check " + write_temp("typo.json", bad.dump()).string()), 2);
  EXPECT_EQ(run_cli("check " + write_temp("broken.json", "{").string()), 2);

}

TEST(Binary, ReportToFileIsReproducible) {
  const std::string sch = kScenarios + "/schwarzschild.json";
  const auto a = std::filesystem::temp_directory_path() / "stagrav_test_a.csv";
  const auto b = std::filesystem::temp_directory_path() / "stagrav_test_b.csv";
  ASSERT_EQ(run_cli("--threads 1 report " + sch + " --which grav,residuals --out " + a.string()), 0);
  ASSERT_EQ(run_cli("--threads 4 report " + sch + " --which grav,residuals --out " + b.string()), 0);
  std::ifstream fa(a), fb(b);
  const std::string ta((std::istreambuf_iterator<char>(fa)), {}), tb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, tb);
}
