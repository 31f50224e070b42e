#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

namespace stagrav::cli {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Multivector random_multivector(Rng& rng) {
  Multivector m;
  for (unsigned i = 0; i < kBlades; ++i) m[i] = uniform(rng, -1.0, 1.0);
  return m;
}

Multivector random_vector(Rng& rng) { return random_multivector(rng).grade(1); }

// Field whose coefficients are random quadratic Taylor polynomials.
FieldJet random_field(Rng& rng) {
  FieldJet X;
  for (unsigned i = 0; i < kBlades; ++i) {
    Jet j(0.0, 2);
    for (int m = 0; m < Jet::size_for_order(2); ++m) j.set_coefficient(m, uniform(rng, -1.0, 1.0));
    X[i] = j;
  }
  return X;
}

double max_abs_diff(const Matrix4<double>& a, const Matrix4<double>& b) {
  double out = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) out = std::max(out, std::abs(a[i][j] - b[i][j]));
  return out;
}

Matrix4<double> transposed(const Matrix4<double>& m) {
  Matrix4<double> t{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) t[i][j] = m[j][i];
  return t;
}

double max_abs(const Matrix4<double>& m) {
  double out = 0.0;
  for (const auto& row : m)
    for (double v : row) out = std::max(out, std::abs(v));
  return out;
}

double nonzero_or_one(double scale) { return scale > 0.0 ? scale : 1.0; }

// Collects named residuals; the order of first use fixes the table order.
class Accumulator {
 public:
  void add(const std::string& name, double residual, double tolerance, int evaluations = 1) {
    auto it = std::find_if(rows_.begin(), rows_.end(), [&](const CheckRow& r) { return r.name == name; });
    if (it == rows_.end()) {
      rows_.push_back({name, 0.0, tolerance, 0});
      it = rows_.end() - 1;
    }
    // NaN must fail, so it propagates instead of being swallowed by max.
    it->residual = std::isnan(residual) || std::isnan(it->residual) ? std::nan("") : std::max(it->residual, residual);
    it->evaluations += evaluations;
  }
  void merge(const Accumulator& other) {
    for (const CheckRow& r : other.rows_) add(r.name, r.residual, r.tolerance, r.evaluations);
  }
  std::vector<CheckRow> rows() const { return rows_; }

 private:
  std::vector<CheckRow> rows_;
};

void algebra_checks(Accumulator& acc) {
  Rng rng(7);
  for (int n = 0; n < 1000; ++n) {
    const Multivector A = random_multivector(rng);
    const Multivector B = random_multivector(rng);
    const Multivector C = random_multivector(rng);
    acc.add("algebra.associativity", max_abs((A * B) * C - A * (B * C)), 1e-12);
  }
  for (int n = 0; n < 1000; ++n) {
    const Multivector a = random_vector(rng);
    const Multivector b = random_vector(rng);
    double dot = 0.0;
    for (int k = 0; k < kDim; ++k) dot += Signature::eta[k] * a[blade_mask(k)] * b[blade_mask(k)];
    acc.add("algebra.vector_anticommutator", max_abs(a * b + b * a - Multivector::scalar(2.0 * dot)), 1e-12);
  }
  for (int n = 0; n < 100; ++n) {
    const Multivector X = random_multivector(rng);
    const Multivector Y = random_multivector(rng);
    const Multivector Z = random_multivector(rng);
    acc.add("algebra.left_contraction_adjoint",
            std::abs(X.left_contract(Y).scalar_product(Z) - Y.scalar_product(X.reverse().wedge(Z))), 1e-12);
    acc.add("algebra.right_contraction_adjoint",
            std::abs(Y.right_contract(X).scalar_product(Z) - Y.scalar_product(Z.wedge(X.reverse()))), 1e-12);
    acc.add("algebra.scalar_part_symmetry", std::abs((X * Y).grade(0)[0] - (Y * X).grade(0)[0]), 1e-12);
  }
  for (unsigned mask = 0; mask < kBlades; ++mask) {
    const Multivector e = Multivector::blade(mask, 1.0);
    const int p = blade_grade(mask);
    const double sign = p % 2 == 0 ? -1.0 : 1.0;
    acc.add("algebra.double_star_sign", max_abs(e.hodge_star().hodge_star() - sign * e), 0.0);
  }
}

// Everything evaluated at one grid point.
Accumulator point_checks(const CompiledScenario& s, std::size_t index) {
  Accumulator acc;
  const Point& x = s.points[index];
  const Configuration& config = s.config;
  const FrameJet frame = frame_jet(config.tetrad, x, config.params, 2);
  const EMReport report = evaluate_report(config, x);
  const double scale = nonzero_or_one(report.scale);

  Rng rng(1000 + index);
  for (int n = 0; n < 3; ++n) {
    const FieldJet X = random_field(rng);
    const FieldJet dX = exterior_d(frame, X);
    acc.add("calculus.d_squared", max_abs(values(exterior_d(frame, dX))) / nonzero_or_one(max_abs(values(dX))),
            1e-9);
    const FieldJet deltaX = codifferential(frame, X);
    acc.add("calculus.delta_squared",
            max_abs(values(codifferential(frame, deltaX))) / nonzero_or_one(max_abs(values(deltaX))), 1e-9);
    const Multivector dirac = values(dirac_operator(frame, X));
    acc.add("calculus.dirac_split", max_abs(dirac - values(dX) + values(deltaX)) / nonzero_or_one(max_abs(dirac)),
            1e-9);
  }
  for (int a = 0; a < kDim; ++a) {
    const FieldJet ga = FieldJet::basis_vector(a);
    FieldJet rhs;
    for (int k = 0; k < kDim; ++k) rhs += FieldJet::basis_vector(k).wedge(covariant_derivative(frame, ga, k));
    const Multivector lhs = values(exterior_d(frame, ga));
    acc.add("calculus.cartan_structure", max_abs(lhs - values(rhs)) / nonzero_or_one(max_abs(lhs)), 1e-9);
  }
  for (int k = 0; k < kDim; ++k)
    acc.add("calculus.volume_parallel", max_abs(values(covariant_derivative(frame, FieldJet::pseudoscalar(), k))),
            1e-9);

  Matrix4<double> product{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      for (int k = 0; k < kDim; ++k) product[i][j] += frame.g_up[i][k].value() * frame.g_dn[k][j].value();
      product[i][j] -= i == j ? 1.0 : 0.0;
    }
  acc.add("frame.metric_inverse", max_abs(product), 1e-12);
  Matrix4<double> G{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) G[i][j] = frame.einstein[i][j].value();
  acc.add("frame.einstein_symmetry", max_abs_diff(G, transposed(G)) / scale, 1e-9);

  OneForms difference;
  const OneForms lowered = lower_index(report.t_nice);
  for (int d = 0; d < kDim; ++d) difference[d] = report.t_lagrangian[d] - lowered[d];
  acc.add("energy.route_equivalence", max_abs(difference) / scale, 1e-8);
  acc.add("energy.einstein_identity", max_abs(report.eq211) / scale, 1e-8);
  double leak = 0.0;
  for (int d = 0; d < kDim; ++d)
    for (const Multivector* m : {&report.t_nice[d], &report.t_lagrangian[d], &report.G[d]})
      leak = std::max(leak, max_abs_outside_grade(*m, 1));
  acc.add("energy.grade_purity", leak / scale, 1e-10);

  if (report.maxwell) {
    const MaxwellEM& m = *report.maxwell;
    const double s = nonzero_or_one(max_abs(m.T_ab));
    acc.add("maxwell.symmetry", max_abs_diff(m.T_ab, transposed(m.T_ab)) / s, 1e-9);
    acc.add("maxwell.two_routes", max_abs_diff(m.T_ab, m.T_ab_components) / s, 1e-9);
    acc.add("maxwell.grade_purity", m.grade_leak / s, 1e-9);
    acc.add("maxwell.dF", max_abs(report.maxwell_eq_residual->dF) / nonzero_or_one(max_abs(m.F)), 1e-9);
  }
  if (report.dirac) {
    const DiracEM& d = *report.dirac;
    acc.add("dirac.symmetry", max_abs_diff(d.T_mk, transposed(d.T_mk)) / nonzero_or_one(max_abs(d.T_mk)), 1e-9);
  }
  if (report.interaction) {
    const InteractionEM& i = *report.interaction;
    acc.add("interaction.symmetry", max_abs_diff(i.T_ab, transposed(i.T_ab)) / nonzero_or_one(max_abs(i.T_ab)),
            1e-9);
  }
  return acc;
}

}  // namespace

void print_checks(std::ostream& os, const CheckReport& report) {
  std::size_t width = 5;
  for (const auto& r : report.rows) width = std::max(width, r.name.size());
  os << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(6) << "evals" << "  "
     << std::setw(24) << "max_residual" << "  " << std::setw(10) << "tolerance" << "  status\n";
  for (const auto& r : report.rows) {
    os << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(6) << r.evaluations << "  "
       << std::setw(24) << format_number(r.residual) << "  " << std::setw(10) << format_number(r.tolerance) << "  "
       << (r.pass() ? "pass" : "FAIL") << '\n';
  }
  os << (report.passed() ? "PASS" : "FAIL") << '\n';
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool CheckReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass(); });
}

CheckReport run_checks(const CompiledScenario& scenario, int threads) {
  Accumulator acc;
  algebra_checks(acc);
  const auto per_point = parallel_map<Accumulator>(
      scenario.points.size(), threads, [&](std::size_t i) { return point_checks(scenario, i); });
  for (const auto& p : per_point) acc.merge(p);
  return {acc.rows()};
}

// ---- report ------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<Group, std::string_view>, 6> kGroupNames{{
    {Group::kGrav, "grav"},
    {Group::kMaxwell, "maxwell"},
    {Group::kDirac, "dirac"},
    {Group::kInteraction, "interaction"},
    {Group::kResiduals, "residuals"},
    {Group::kLagrangians, "lagrangians"},
}};

void matrix_columns(std::vector<std::string>& out, const std::string& prefix) {
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) out.push_back(prefix + std::to_string(a) + std::to_string(b));
}

void matrix_values(std::vector<double>& out, const Matrix4<double>& m) {
  for (const auto& row : m)
    for (double v : row) out.push_back(v);
}

bool has_group(const std::vector<Group>& groups, Group g) {
  return std::find(groups.begin(), groups.end(), g) != groups.end();
}

std::vector<double> report_row(const CompiledScenario& s, const std::vector<Group>& groups, std::size_t index) {
  const Point& x = s.points[index];
  const EMReport r = evaluate_report(s.config, x);
  std::vector<double> row(x.begin(), x.end());
  const bool has_A = r.maxwell.has_value();
  const bool has_psi = r.dirac.has_value();
  for (const Group g : groups) {
    switch (g) {
      case Group::kGrav:
        matrix_values(row, r.t_components);
        row.push_back(r.ricci_scalar);
        break;
      case Group::kMaxwell:
        matrix_values(row, r.maxwell->T_ab);
        break;
      case Group::kDirac:
        matrix_values(row, r.dirac->T_mk);
        break;
      case Group::kInteraction:
        matrix_values(row, r.interaction->T_ab);
        break;
      case Group::kResiduals: {
        OneForms difference;
        const OneForms lowered = lower_index(r.t_nice);
        for (int d = 0; d < kDim; ++d) difference[d] = r.t_lagrangian[d] - lowered[d];
        double leak = 0.0;
        for (const auto& t : r.t_nice) leak = std::max(leak, max_abs_outside_grade(t, 1));
        row.push_back(max_abs(difference));
        row.push_back(max_abs(r.eq211));
        row.push_back(max_abs(r.field_residual));
        row.push_back(leak);
        if (has_A) {
          row.push_back(max_abs(r.maxwell_eq_residual->dF));
          row.push_back(max_abs(r.maxwell_eq_residual->deltaF_plus_J));
        }
        if (has_psi) row.push_back(max_abs(*r.dirac_eq_residual));
        if (has_A && has_psi) row.push_back(r.interaction->current_mismatch);
        break;
      }
      case Group::kLagrangians:
        row.push_back(r.lagrangians.L_g);
        if (r.lagrangians.L_M) row.push_back(*r.lagrangians.L_M);
        if (r.lagrangians.L_D) row.push_back(*r.lagrangians.L_D);
        if (r.lagrangians.L_FD) row.push_back(*r.lagrangians.L_FD);
        break;
    }
  }
  return row;
}

}  // namespace

std::vector<Group> parse_groups(std::string_view list) {
  std::vector<bool> wanted(kGroupNames.size(), false);
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view name = list.substr(start, comma - start);
    const auto it = std::find_if(kGroupNames.begin(), kGroupNames.end(),
                                 [&](const auto& entry) { return entry.second == name; });
    if (it == kGroupNames.end())
      throw UsageError("unknown report group '" + std::string(name) +
                       "' (expected grav, maxwell, dirac, interaction, residuals, lagrangians)");
    wanted[static_cast<std::size_t>(it - kGroupNames.begin())] = true;
    start = comma + 1;
  }
  std::vector<Group> out;
  for (std::size_t i = 0; i < kGroupNames.size(); ++i)
    if (wanted[i]) out.push_back(kGroupNames[i].first);
  return out;
}

std::vector<std::string> report_header(const CompiledScenario& s, const std::vector<Group>& groups) {
  const bool has_A = s.config.matter.A.has_value();
  const bool has_psi = s.config.matter.psi.has_value();
  if (has_group(groups, Group::kMaxwell) && !has_A)
    throw UsageError("report group 'maxwell' needs a maxwell_potential in the scenario");
  if (has_group(groups, Group::kDirac) && !has_psi)
    throw UsageError("report group 'dirac' needs a spinor in the scenario");
  if (has_group(groups, Group::kInteraction) && !(has_A && has_psi))
    throw UsageError("report group 'interaction' needs both maxwell_potential and spinor in the scenario");

  std::vector<std::string> out(s.source.chart.begin(), s.source.chart.end());
  for (const Group g : groups) {
    switch (g) {
      case Group::kGrav:
        matrix_columns(out, "t_");
        out.push_back("R");
        break;
      case Group::kMaxwell:
        matrix_columns(out, "TM_");
        break;
      case Group::kDirac:
        matrix_columns(out, "TD_");
        break;
      case Group::kInteraction:
        matrix_columns(out, "TMD_");
        break;
      case Group::kResiduals:
        for (const char* name : {"res_route", "res_einstein", "res_field", "res_grade"}) out.push_back(name);
        if (has_A) {
          out.push_back("res_dF");
          out.push_back("res_maxwell");
        }
        if (has_psi) out.push_back("res_dirac");
        if (has_A && has_psi) out.push_back("res_current");
        break;
      case Group::kLagrangians:
        out.push_back("L_g");
        if (has_A) out.push_back("L_M");
        if (has_psi) out.push_back("L_D");
        if (has_A && has_psi) out.push_back("L_FD");
        break;
    }
  }
  return out;
}

void write_report(std::ostream& os, const CompiledScenario& s, const std::vector<Group>& groups, int threads) {
  const std::vector<std::string> header = report_header(s, groups);
  const auto rows = parallel_map<std::vector<double>>(
      s.points.size(), threads, [&](std::size_t i) { return report_row(s, groups, i); });
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
}

// ---- integrate ---------------------------------------------------------------

Json integrate(const CompiledScenario& s) {
  if (!s.source.integration) throw ScenarioError("integration", "missing field (required by integrate)");
  const IntegrationSpec& spec = *s.source.integration;
  const Region region(s.symbols, spec.r_coordinate, spec.r_min);
  QuadratureOptions options;
  options.tolerance = spec.tolerance;
  const SpatialIntegrals result = integrate_energy_momentum(s.config.tetrad, region, s.config.params, options);
  Json j = Json::object();
  j["energy"] = result.energy;
  j["momentum"] = Json::array({result.momentum[0], result.momentum[1], result.momentum[2]});
  j["panels"] = result.panels;
  return j;
}

// ---- verify-schwarzschild ----------------------------------------------------

CheckReport verify_schwarzschild(double M, double R, const VerifyOptions& options) {
  if (!std::isfinite(M) || !std::isfinite(R) || M < 0.0)
    throw RegionError("mass must be finite and non-negative, radius finite");
  if (!(R > 2.0 * M) || !(R > 0.0))
    throw RegionError("radius " + format_number(R) + " must exceed the horizon radius 2M = " + format_number(2.0 * M));

  const Tetrad tetrad = schwarzschild_tetrad();
  const std::vector<double> params{M};
  const double r_lo = options.r_min > 0.0 ? options.r_min : R;
  const double r_hi = options.r_max > 0.0 ? options.r_max : 5.0 * R;

  Accumulator acc;
  Rng rng(options.seed);
  for (int n = 0; n < options.points; ++n) {
    const double r = uniform(rng, r_lo, r_hi);
    const double theta = uniform(rng, 0.1, std::numbers::pi - 0.1);
    const Point x{uniform(rng, -10.0, 10.0), r, theta, uniform(rng, 0.0, 2.0 * std::numbers::pi)};
    const OneForms t = grav_em_nice(tetrad, x, params);

    const double f = 1.0 - 2.0 * M / r;
    const double cot = std::cos(theta) / std::sin(theta);
    const double csc = 1.0 / std::sin(theta);
    OneForms closed;
    closed[0][blade_mask(0)] = M * M / (f * std::pow(r, 4));
    closed[2][blade_mask(1)] = cot * std::sqrt(f) / (r * r);
    closed[2][blade_mask(2)] = -2.0 * M / std::pow(r, 3);
    closed[3][blade_mask(3)] = (-M + r + M * std::cos(2.0 * theta)) / std::pow(r, 3) * csc * csc;
    const double scale = max_abs(closed);
    for (int d = 0; d < kDim; ++d)
      acc.add("t^" + std::to_string(d) + " closed form", max_abs(t[d] - closed[d]) / scale, 1e-8);

    const Matrix4<double> m = components(t);
    acc.add("t^12 = -cot(theta) sqrt(1-2M/r)/r^2", std::abs(m[1][2] + cot * std::sqrt(f) / (r * r)) / scale, 1e-8);
    acc.add("t^21 = 0", std::abs(m[2][1]) / scale, 1e-8);
  }

  if (options.integrate) {
    const Region region(tetrad.symbols(), "r", format_number(R));
    const SpatialIntegrals result = integrate_energy_momentum(tetrad, region, params);
    const double closed = 4.0 * std::numbers::pi * M * (1.0 - 1.0 / std::sqrt(1.0 - 2.0 * M / R));
    const double denom = closed != 0.0 ? std::abs(closed) : 1.0;
    acc.add("energy beyond R", std::abs(result.energy - closed) / denom, 1e-6);
    double p = 0.0;
    for (double v : result.momentum) p = std::max(p, std::abs(v));
    acc.add("momentum beyond R", p, 1e-9);
  }
  return {acc.rows()};
}

}  // namespace stagrav::cli
