#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

namespace stagrav::cli {

namespace {

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void require_keys(const Json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ScenarioError(path.empty() ? key : path + "." + key, "unknown field");
}

const Json& field(const Json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ScenarioError(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Expressions may be written as JSON strings or plain numbers.
std::string expression_text(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text.empty()) throw ScenarioError(path, "empty expression");
    return text;
  }
  if (j.is_number()) return shortest(j.get<double>());
  throw ScenarioError(path, "expected an expression string or a number");
}

double real(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ScenarioError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(path, "expected a finite number");
  return v;
}

template <std::size_t N>
std::array<std::string, N> expression_array(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != N)
    throw ScenarioError(path, "expected an array of " + std::to_string(N) + " expressions");
  std::array<std::string, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = expression_text(j[i], index_path(path, i));
  return out;
}

Expr parse_at(const std::string& text, const SymbolsPtr& symbols, const std::string& path) {
  try {
    return Expr::parse(text, symbols);
  } catch (const Error& e) {
    throw ScenarioError(path, e.what());
  }
}

double evaluate_constant(const std::string& text, const SymbolsPtr& symbols,
                         const std::vector<double>& params, const std::string& path) {
  const Expr e = parse_at(text, symbols, path);
  if (e.depends_on_coordinates()) throw ScenarioError(path, "may depend on parameters only");
  try {
    const Point origin{};
    return e.eval(origin, params);
  } catch (const Error& err) {
    throw ScenarioError(path, err.what());
  }
}

Json axis_to_json(const GridAxis& a) {
  Json j = Json::object();
  if (!a.values.empty()) {
    j["values"] = a.values;
  } else {
    j["min"] = *a.min;
    j["max"] = *a.max;
    j["count"] = a.count;
  }
  return j;
}

GridAxis axis_from_json(const Json& j, const std::string& path) {
  GridAxis a;
  if (j.is_number() || j.is_string()) {
    a.values = {expression_text(j, path)};
    return a;
  }
  require_keys(j, path, {"min", "max", "count", "values"});
  if (j.contains("values")) {
    if (j.contains("min") || j.contains("max") || j.contains("count"))
      throw ScenarioError(path, "give either values or min/max/count, not both");
    const Json& v = j["values"];
    if (!v.is_array() || v.empty()) throw ScenarioError(join(path, "values"), "expected a non-empty array");
    for (std::size_t i = 0; i < v.size(); ++i)
      a.values.push_back(expression_text(v[i], index_path(join(path, "values"), i)));
    return a;
  }
  a.min = expression_text(field(j, path, "min"), join(path, "min"));
  a.max = expression_text(field(j, path, "max"), join(path, "max"));
  const Json& c = field(j, path, "count");
  if (!c.is_number_integer() || c.get<long long>() < 1)
    throw ScenarioError(join(path, "count"), "expected an integer >= 1");
  a.count = c.get<int>();
  return a;
}

}  // namespace

Scenario scenario_from_json(const Json& j) {
  require_keys(j, "", {"chart", "parameters", "tetrad", "maxwell_potential", "spinor", "grid",
                       "integration"});
  Scenario s;

  const Json& chart = field(j, "", "chart");
  if (!chart.is_array() || chart.size() != kDim)
    throw ScenarioError("chart", "expected four coordinate names");
  std::set<std::string> names;
  for (std::size_t i = 0; i < kDim; ++i) {
    if (!chart[i].is_string() || chart[i].get<std::string>().empty())
      throw ScenarioError(index_path("chart", i), "expected a coordinate name");
    s.chart[i] = chart[i].get<std::string>();
    if (!names.insert(s.chart[i]).second) throw ScenarioError(index_path("chart", i), "duplicate name");
  }

  if (j.contains("parameters")) {
    const Json& p = j["parameters"];
    if (!p.is_object()) throw ScenarioError("parameters", "expected an object of name: value");
    for (const auto& [name, value] : p.items()) {
      if (!names.insert(name).second) throw ScenarioError("parameters." + name, "name already used");
      s.parameters.emplace_back(name, real(value, "parameters." + name));
    }
  }

  const Json& tetrad = field(j, "", "tetrad");
  if (!tetrad.is_array() || tetrad.size() != kDim) throw ScenarioError("tetrad", "expected 4 rows");
  for (std::size_t a = 0; a < kDim; ++a)
    s.tetrad[a] = expression_array<kDim>(tetrad[a], index_path("tetrad", a));

  if (j.contains("maxwell_potential"))
    s.maxwell_potential = expression_array<kDim>(j["maxwell_potential"], "maxwell_potential");

  if (j.contains("spinor")) {
    const Json& sp = j["spinor"];
    require_keys(sp, "spinor", {"components", "mass", "charge"});
    SpinorSpec spec;
    spec.components = expression_array<8>(field(sp, "spinor", "components"), "spinor.components");
    if (sp.contains("mass")) spec.mass = real(sp["mass"], "spinor.mass");
    if (spec.mass < 0.0) throw ScenarioError("spinor.mass", "must be >= 0");
    if (sp.contains("charge")) spec.charge = real(sp["charge"], "spinor.charge");
    s.spinor = spec;
  }

  const Json& grid = field(j, "", "grid");
  if (!grid.is_object()) throw ScenarioError("grid", "expected an object keyed by coordinate name");
  for (const auto& [key, value] : grid.items()) {
    bool known = false;
    for (const auto& c : s.chart) known = known || c == key;
    if (!known) throw ScenarioError("grid." + key, "not a chart coordinate");
  }
  for (std::size_t mu = 0; mu < kDim; ++mu)
    s.grid[mu] = axis_from_json(field(grid, "grid", s.chart[mu]), "grid." + s.chart[mu]);

  if (j.contains("integration")) {
    const Json& in = j["integration"];
    require_keys(in, "integration", {"r_coordinate", "r_min", "tolerance"});
    IntegrationSpec spec;
    if (in.contains("r_coordinate")) {
      if (!in["r_coordinate"].is_string()) throw ScenarioError("integration.r_coordinate", "expected a name");
      spec.r_coordinate = in["r_coordinate"].get<std::string>();
    }
    spec.r_min = expression_text(field(in, "integration", "r_min"), "integration.r_min");
    if (in.contains("tolerance")) spec.tolerance = real(in["tolerance"], "integration.tolerance");
    if (!(spec.tolerance > 0.0)) throw ScenarioError("integration.tolerance", "must be > 0");
    s.integration = spec;
  }
  return s;
}

Json scenario_to_json(const Scenario& s) {
  Json j = Json::object();
  j["chart"] = s.chart;
  Json params = Json::object();
  for (const auto& [name, value] : s.parameters) params[name] = value;
  j["parameters"] = params;
  j["tetrad"] = s.tetrad;
  if (s.maxwell_potential) j["maxwell_potential"] = *s.maxwell_potential;
  if (s.spinor) {
    Json sp = Json::object();
    sp["components"] = s.spinor->components;
    sp["mass"] = s.spinor->mass;
    sp["charge"] = s.spinor->charge;
    j["spinor"] = sp;
  }
  Json grid = Json::object();
  for (std::size_t mu = 0; mu < kDim; ++mu) grid[s.chart[mu]] = axis_to_json(s.grid[mu]);
  j["grid"] = grid;
  if (s.integration) {
    Json in = Json::object();
    in["r_coordinate"] = s.integration->r_coordinate;
    in["r_min"] = s.integration->r_min;
    in["tolerance"] = s.integration->tolerance;
    j["integration"] = in;
  }
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path, "cannot open scenario file");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path, std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

CompiledScenario compile(const Scenario& s) {
  CompiledScenario out;
  out.source = s;
  auto symbols = std::make_shared<Symbols>();
  symbols->coordinates = s.chart;
  for (const auto& [name, value] : s.parameters) {
    symbols->parameters.push_back(name);
    out.config.params.push_back(value);
  }
  out.symbols = symbols;

  Matrix4<Expr> entries;
  for (std::size_t a = 0; a < kDim; ++a)
    for (std::size_t mu = 0; mu < kDim; ++mu)
      entries[a][mu] = parse_at(s.tetrad[a][mu], symbols,
                                index_path(index_path("tetrad", a), mu));
  out.config.tetrad = Tetrad(symbols, entries);

  if (s.maxwell_potential) {
    for (std::size_t mu = 0; mu < kDim; ++mu)
      parse_at((*s.maxwell_potential)[mu], symbols, index_path("maxwell_potential", mu));
    out.config.matter.A = CoordinateOneForm(symbols, *s.maxwell_potential);
  }
  if (s.spinor) {
    for (std::size_t i = 0; i < 8; ++i)
      parse_at(s.spinor->components[i], symbols, index_path("spinor.components", i));
    out.config.matter.psi = SpinorField(symbols, s.spinor->components);
    out.config.matter.mass = s.spinor->mass;
    out.config.matter.charge = s.spinor->charge;
  }
  if (s.integration) {
    const int r = symbols->coordinate_index(s.integration->r_coordinate);
    if (r <= 0) throw ScenarioError("integration.r_coordinate", "must name a spatial chart coordinate");
    parse_at(s.integration->r_min, symbols, "integration.r_min");
  }

  std::array<std::vector<double>, kDim> axes;
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    const GridAxis& a = s.grid[mu];
    const std::string path = "grid." + s.chart[mu];
    if (!a.values.empty()) {
      for (std::size_t i = 0; i < a.values.size(); ++i)
        axes[mu].push_back(evaluate_constant(a.values[i], symbols, out.config.params,
                                             index_path(path + ".values", i)));
    } else {
      const double lo = evaluate_constant(*a.min, symbols, out.config.params, path + ".min");
      const double hi = evaluate_constant(*a.max, symbols, out.config.params, path + ".max");
      for (int i = 0; i < a.count; ++i)
        axes[mu].push_back(a.count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (a.count - 1));
    }
  }
  for (double x0 : axes[0])
    for (double x1 : axes[1])
      for (double x2 : axes[2])
        for (double x3 : axes[3]) out.points.push_back({x0, x1, x2, x3});
  return out;
}

}  // namespace stagrav::cli
