#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stagrav/energy_momentum.hpp"
#include "stagrav/errors.hpp"
#include "stagrav/quadrature.hpp"

namespace stagrav::cli {

using Json = nlohmann::ordered_json;

/// Invalid scenario content; `path()` locates the offending field, e.g. "tetrad[3][3]".
class ScenarioError : public Error {
 public:
  ScenarioError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// One grid axis: either `count` evenly spaced values from `min` to `max`
/// (inclusive), or an explicit list. Bounds and values are expressions over
/// the scenario parameters.
struct GridAxis {
  std::optional<std::string> min;
  std::optional<std::string> max;
  int count = 1;
  std::vector<std::string> values;
};

struct SpinorSpec {
  std::array<std::string, 8> components;
  double mass = 0.0;
  double charge = 0.0;
};

struct IntegrationSpec {
  std::string r_coordinate = "r";
  std::string r_min;
  double tolerance = 1e-8;
};

struct Scenario {
  std::array<std::string, kDim> chart;
  std::vector<std::pair<std::string, double>> parameters;
  std::array<std::array<std::string, kDim>, kDim> tetrad;
  std::optional<std::array<std::string, kDim>> maxwell_potential;
  std::optional<SpinorSpec> spinor;
  std::array<GridAxis, kDim> grid;
  std::optional<IntegrationSpec> integration;
};

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

/// A scenario with every expression parsed and the grid expanded.
struct CompiledScenario {
  Scenario source;
  SymbolsPtr symbols;
  Configuration config;
  std::vector<Point> points;  // last chart coordinate varies fastest
};

CompiledScenario compile(const Scenario& s);

}  // namespace stagrav::cli
