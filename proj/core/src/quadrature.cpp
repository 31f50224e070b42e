#include "stagrav/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <vector>

#include "stagrav/energy_momentum.hpp"
#include "stagrav/errors.hpp"

namespace stagrav {

namespace {

constexpr int kNodes = 10;
using Rule = boost::math::quadrature::gauss<double, kNodes>;

template <std::size_t N>
using Values = std::array<double, N>;

template <std::size_t N>
struct PanelEstimate {
  Values<N> value{};
  Values<N> abs_value{};
};

template <std::size_t N, typename F>
PanelEstimate<N> gauss_panel(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  PanelEstimate<N> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      const Values<N> v = f(mid + sign * half * x[i]);
      for (std::size_t c = 0; c < N; ++c) {
        out.value[c] += w[i] * v[c];
        out.abs_value[c] += w[i] * std::abs(v[c]);
      }
    }
  }
  for (std::size_t c = 0; c < N; ++c) {
    out.value[c] *= half;
    out.abs_value[c] *= half;
  }
  return out;
}

// Pairwise summation of panel values in panel order.
template <std::size_t N>
Values<N> pairwise_sum(std::span<const Values<N>> parts) {
  if (parts.empty()) return Values<N>{};
  if (parts.size() == 1) return parts.front();
  const std::size_t mid = parts.size() / 2;
  Values<N> left = pairwise_sum<N>(parts.first(mid));
  const Values<N> right = pairwise_sum<N>(parts.subspan(mid));
  for (std::size_t c = 0; c < N; ++c) left[c] += right[c];
  return left;
}

// Global adaptive bisection. Every panel carries the two-halves estimate and
// the difference to its whole-panel estimate as error. The panel with the
// largest error is split until the summed error meets the tolerance. A split
// that does not reduce the error marks both children as roundoff limited;
// they are kept but never split again.
//
// With `has_floor`, the last component is a nonnegative roundoff floor
// density: it is integrated alongside the others, and a panel whose error
// lies below its integrated floor counts as resolved.
template <std::size_t N, typename F>
class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const F& f, double a, double b, const QuadratureOptions& options, bool has_floor)
      : f_(f), options_(options), values_(has_floor ? N - 1 : N) {
    if (!(options_.tolerance > 0.0)) throw ConvergenceError("quadrature tolerance must be positive");
    const int n = std::max(1, options_.initial_panels);
    for (int i = 0; i < n; ++i) {
      const double lo = a + (b - a) * static_cast<double>(i) / n;
      const double hi = a + (b - a) * static_cast<double>(i + 1) / n;
      const PanelEstimate<N> whole = gauss_panel<N>(f_, lo, hi);
      panels_.push_back(split(lo, hi, whole.value));
    }
  }

  std::pair<Values<N>, int> run() {
    for (;;) {
      double total_error = 0.0;
      double scale = 0.0;
      Values<N> l1{};
      std::size_t worst = panels_.size();
      for (std::size_t i = 0; i < panels_.size(); ++i) {
        const Panel& p = panels_[i];
        total_error += p.error;
        for (std::size_t c = 0; c < values_; ++c) l1[c] += p.abs_value[c];
        if (!p.stuck && (worst == panels_.size() || p.error > panels_[worst].error)) worst = i;
      }
      for (double v : l1) scale = std::max(scale, v);
      if (total_error <= options_.tolerance * scale || worst == panels_.size()) break;
      if (static_cast<int>(panels_.size()) >= options_.max_panels)
        throw ConvergenceError("quadrature did not converge within " +
                               std::to_string(options_.max_panels) + " panels");
      const Panel parent = panels_[worst];
      const double mid = 0.5 * (parent.a + parent.b);
      Panel left = split(parent.a, mid, parent.left);
      Panel right = split(mid, parent.b, parent.right);
      if (left.error + right.error >= parent.error) left.stuck = right.stuck = true;
      panels_[worst] = left;
      panels_.insert(panels_.begin() + static_cast<std::ptrdiff_t>(worst) + 1, right);
    }
    std::vector<Values<N>> parts;
    parts.reserve(panels_.size());
    for (const Panel& p : panels_) parts.push_back(p.value);
    return {pairwise_sum<N>(parts), static_cast<int>(panels_.size())};
  }

 private:
  struct Panel {
    double a = 0.0;
    double b = 0.0;
    Values<N> left{};
    Values<N> right{};
    Values<N> value{};
    Values<N> abs_value{};
    double error = 0.0;
    bool stuck = false;
  };

  Panel split(double a, double b, const Values<N>& whole) const {
    const double mid = 0.5 * (a + b);
    const PanelEstimate<N> l = gauss_panel<N>(f_, a, mid);
    const PanelEstimate<N> r = gauss_panel<N>(f_, mid, b);
    Panel p;
    p.a = a;
    p.b = b;
    p.left = l.value;
    p.right = r.value;
    for (std::size_t c = 0; c < N; ++c) {
      p.value[c] = l.value[c] + r.value[c];
      p.abs_value[c] = l.abs_value[c] + r.abs_value[c];
      if (c < values_) p.error = std::max(p.error, std::abs(p.value[c] - whole[c]));
    }
    if (values_ < N && p.error <= p.value[N - 1]) p.error = 0.0;
    if (!(mid > a && b > mid)) p.stuck = true;
    return p;
  }

  const F& f_;
  QuadratureOptions options_;
  std::size_t values_;
  std::vector<Panel> panels_;
};

template <std::size_t N, typename F>
std::pair<Values<N>, int> adaptive(const F& f, double a, double b, const QuadratureOptions& options,
                                   bool has_floor = false) {
  return AdaptiveIntegrator<N, F>(f, a, b, options, has_floor).run();
}

// 2 pi int_R^inf dr int_0^pi dtheta density(r, theta) for vector densities.
template <std::size_t N, typename Density>
std::pair<Values<N>, int> exterior(const Density& density, double R, const QuadratureOptions& options,
                                   bool has_floor = false) {
  int panels = 0;
  // Inner integrals are resolved more tightly so their error does not look
  // like roughness to the outer integrator.
  QuadratureOptions inner = options;
  inner.tolerance = 0.1 * options.tolerance;
  auto radial = [&](double s) {
    const double r = R / s;
    auto angular = [&](double theta) { return density(r, theta); };
    const double half_pi = 0.5 * std::numbers::pi;
    auto [upper, n1] = adaptive<N>(angular, 0.0, half_pi, inner, has_floor);
    auto [lower, n2] = adaptive<N>(angular, half_pi, std::numbers::pi, inner, has_floor);
    panels += n1 + n2;
    Values<N> out;
    const double jacobian = R / (s * s);
    for (std::size_t c = 0; c < N; ++c) out[c] = jacobian * (upper[c] + lower[c]);
    return out;
  };
  auto [value, outer] = adaptive<N>(radial, 0.0, 1.0, options, has_floor);
  for (auto& v : value) v *= 2.0 * std::numbers::pi;
  return {value, panels + outer};
}

}  // namespace

QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  auto wrapped = [&](double x) { return Values<1>{f(x)}; };
  auto [value, panels] = adaptive<1>(wrapped, a, b, options);
  return {value[0], panels};
}

QuadratureResult integrate_exterior(const std::function<double(double, double)>& density, double R,
                                    const QuadratureOptions& options) {
  if (!(R > 0.0)) throw RegionError("radial lower bound must be positive");
  auto wrapped = [&](double r, double theta) { return Values<1>{density(r, theta)}; };
  auto [value, panels] = exterior<1>(wrapped, R, options);
  return {value[0], panels};
}

Region::Region(const SymbolsPtr& symbols, std::string r_coordinate, const std::string& r_min) {
  r_index_ = symbols->coordinate_index(r_coordinate);
  if (r_index_ <= 0)
    throw RegionError("radial coordinate '" + r_coordinate + "' must be a spatial chart coordinate");
  std::vector<int> angles;
  for (int mu = 1; mu < kDim; ++mu)
    if (mu != r_index_) angles.push_back(mu);
  theta_index_ = angles[0];
  phi_index_ = angles[1];
  r_min_ = Expr::parse(r_min, symbols);
  if (r_min_.depends_on_coordinates())
    throw RegionError("radial lower bound may depend on parameters only");
}

double Region::lower_bound(std::span<const double> params) const {
  const Point origin{};
  return r_min_.eval(origin, params);
}

SpatialIntegrals integrate_energy_momentum(const Tetrad& tetrad, const Region& region,
                                           std::span<const double> params,
                                           const QuadratureOptions& options) {
  const double R = region.lower_bound(params);
  if (!(R > 0.0) || !std::isfinite(R)) throw RegionError("radial lower bound must be positive and finite");

  auto density = [&](double t, double r, double theta, double phi) {
    Point p{};
    p[0] = t;
    p[static_cast<std::size_t>(region.r_index())] = r;
    p[static_cast<std::size_t>(region.theta_index())] = theta;
    p[static_cast<std::size_t>(region.phi_index())] = phi;
    const FrameJet frame = frame_jet(tetrad, p, params, 2);
    const OneFormJets em = grav_em_nice(frame);
    const std::array<int, 3> idx{region.r_index(), region.theta_index(), region.phi_index()};
    Matrix4<double> g{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) g[i][j] = frame.g_dn[idx[i]][idx[j]].value();
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    const double dV = std::sqrt(std::abs(det));
    Values<5> out;
    double magnitude = 0.0;
    for (int d = 0; d < kDim; ++d) {
      out[static_cast<std::size_t>(d)] = -em[d][blade_mask(0)].value() * dV;
      magnitude = std::max(magnitude, max_abs(values(em[d])));
    }
    // The gravitational forms cancel to a few LDBL_EPSILON of their size.
    out[4] = 16 * LDBL_EPSILON * magnitude * dV;
    return out;
  };

  auto at = [&](double t, double r, double theta, double phi) {
    try {
      return density(t, r, theta, phi);
    } catch (const DomainError& e) {
      throw RegionError(std::string("integration region leaves the domain of the tetrad: ") + e.what());
    } catch (const SingularTetradError& e) {
      throw RegionError(std::string("integration region reaches a singular tetrad: ") + e.what());
    }
  };

  // The boundary sphere itself must be regular.
  (void)at(0.0, R, 0.5 * std::numbers::pi, 0.0);

  // Spot check that the integrand is static and axially symmetric.
  for (double theta : {0.7, 1.9}) {
    const double r = 1.5 * R;
    const Values<5> base = at(0.0, r, theta, 0.0);
    const Values<5> moved = at(0.83, r, theta, 1.37);
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      scale = std::max(scale, std::abs(base[c]));
      diff = std::max(diff, std::abs(base[c] - moved[c]));
    }
    if (diff > 1e-9 * scale + base[4] + moved[4])
      throw RegionError("energy-momentum density depends on time or azimuth; integration needs a static, axially symmetric chart");
  }

  auto [value, panels] =
      exterior<5>([&](double r, double theta) { return at(0.0, r, theta, 0.0); }, R, options, true);
  SpatialIntegrals out;
  out.energy = value[0];
  out.momentum = {value[1], value[2], value[3]};
  out.panels = panels;
  return out;
}

double integrate_energy(const Tetrad& tetrad, const Region& region, std::span<const double> params,
                        const QuadratureOptions& options) {
  return integrate_energy_momentum(tetrad, region, params, options).energy;
}

std::array<double, 3> momentum_components(const Tetrad& tetrad, const Region& region,
                                          std::span<const double> params,
                                          const QuadratureOptions& options) {
  return integrate_energy_momentum(tetrad, region, params, options).momentum;
}

}  // namespace stagrav
