#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "scenario.hpp"

namespace stagrav::cli {

/// Invalid command-line usage (maps to exit status 2, like scenario errors).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Shortest decimal that round-trips to `v`; negative zero prints as "0".
std::string format_number(double v);

/// Evaluates `fn(i)` for i in [0, n) on up to `threads` workers and returns
/// the results in index order. If any call throws, the exception of the
/// lowest failing index is rethrown.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int threads, const std::function<T(std::size_t)>& fn);

// ---- check -------------------------------------------------------------------

struct CheckRow {
  std::string name;
  double residual = 0.0;  // largest normalized residual over all evaluations
  double tolerance = 0.0;
  int evaluations = 0;
  bool pass() const { return residual <= tolerance; }
};

struct CheckReport {
  std::vector<CheckRow> rows;
  bool passed() const;
};

CheckReport run_checks(const CompiledScenario& scenario, int threads);
void print_checks(std::ostream& os, const CheckReport& report);

// ---- report ------------------------------------------------------------------

enum class Group { kGrav, kMaxwell, kDirac, kInteraction, kResiduals, kLagrangians };

/// Parses "grav,maxwell,..." into groups in the fixed column order
/// grav, maxwell, dirac, interaction, residuals, lagrangians.
std::vector<Group> parse_groups(std::string_view list);

std::vector<std::string> report_header(const CompiledScenario& scenario, const std::vector<Group>& groups);
/// Writes the CSV header and one row per grid point.
void write_report(std::ostream& os, const CompiledScenario& scenario, const std::vector<Group>& groups,
                  int threads);

// ---- integrate ---------------------------------------------------------------

/// {"energy", "momentum", "panels"} from the scenario's integration block.
Json integrate(const CompiledScenario& scenario);

// ---- verify-schwarzschild ----------------------------------------------------

struct VerifyOptions {
  int points = 100;
  unsigned long long seed = 20240601ULL;
  double r_min = 0.0;  // defaults to the radius R
  double r_max = 0.0;  // defaults to 5 R
  bool integrate = true;
};

/// Closed-form checks of the Schwarzschild energy-momentum 1-forms at random
/// exterior points, plus the exterior energy and momentum beyond R.
CheckReport verify_schwarzschild(double mass, double radius, const VerifyOptions& options = {});

}  // namespace stagrav::cli

#include "parallel_map.inl"
