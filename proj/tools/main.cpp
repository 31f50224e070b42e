#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kInputError = 2 };

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int main(int argc, char** argv) {
  using namespace stagrav::cli;

  CLI::App app{"Energy-momentum of gravitational fields in the spacetime algebra"};
  app.require_subcommand(1);
  int threads = default_threads();
  app.add_option("--threads", threads, "Worker threads for grid evaluation")->check(CLI::PositiveNumber);

  std::string scenario_path;
  auto* check = app.add_subcommand("check", "Run residual checks over the scenario grid");
  check->add_option("file", scenario_path, "Scenario JSON file")->required();

  auto* report = app.add_subcommand("report", "Write energy-momentum components as CSV");
  report->add_option("file", scenario_path, "Scenario JSON file")->required();
  std::string which = "grav";
  std::string out_path;
  report->add_option("--which", which,
                     "Comma-separated groups: grav, maxwell, dirac, interaction, residuals, lagrangians");
  report->add_option("--out", out_path, "CSV output file (default: stdout)");

  auto* integrate_cmd = app.add_subcommand("integrate", "Integrate energy and momentum beyond r_min");
  integrate_cmd->add_option("file", scenario_path, "Scenario JSON file")->required();

  auto* verify = app.add_subcommand("verify-schwarzschild", "Check Schwarzschild closed forms and energy");
  double mass = 1.0;
  double radius = 10.0;
  verify->add_option("--mass", mass, "Mass parameter M")->required();
  verify->add_option("--radius", radius, "Inner radius R of the integration region")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    if (*check) {
      const CheckReport result = run_checks(compile(load_scenario(scenario_path)), threads);
      print_checks(std::cout, result);
      return result.passed() ? kPass : kCheckFailure;
    }
    if (*report) {
      const CompiledScenario scenario = compile(load_scenario(scenario_path));
      const auto groups = parse_groups(which);
      if (out_path.empty()) {
        write_report(std::cout, scenario, groups, threads);
      } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw UsageError("cannot write " + out_path);
        write_report(out, scenario, groups, threads);
      }
      return kPass;
    }
    if (*integrate_cmd) {
      std::cout << integrate(compile(load_scenario(scenario_path))).dump(2) << '\n';
      return kPass;
    }
    if (*verify) {
      const CheckReport result = verify_schwarzschild(mass, radius);
      std::cout << "Schwarzschild M = " << format_number(mass) << ", R = " << format_number(radius) << '\n';
      print_checks(std::cout, result);
      return result.passed() ? kPass : kCheckFailure;
    }
  } catch (const stagrav::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailure;
  } catch (const stagrav::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
