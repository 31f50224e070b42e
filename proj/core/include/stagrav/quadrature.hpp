#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>

#include "stagrav/expr.hpp"
#include "stagrav/frame.hpp"

namespace stagrav {

struct QuadratureOptions {
  /// Relative tolerance against the L1 norm of the integrand.
  double tolerance = 1e-8;
  /// Equal panels each interval starts with before adaptive bisection.
  int initial_panels = 1;
  /// Accepted-panel budget per one-dimensional integral.
  int max_panels = 4096;
};

struct QuadratureResult {
  double value = 0.0;
  int panels = 0;
};

/// Adaptive Gauss-Legendre integration of f over [a, b]. Panels are bisected
/// until the two-halves estimate agrees with the whole-panel estimate. Nodes
/// are interior, so integrable endpoint singularities are never sampled.
/// Throws ConvergenceError when the panel budget is exhausted.
QuadratureResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// 2*pi * integral over r in [R, inf) and theta in [0, pi] of density(r, theta).
/// The radial range is mapped to s = R/r in (0, 1]; theta panels split at pi/2.
QuadratureResult integrate_exterior(const std::function<double(double r, double theta)>& density,
                                    double R, const QuadratureOptions& options = {});

/// Exterior of a sphere r >= R on a static chart. The chart is read as
/// (time, three spatial coordinates): the radial coordinate is named by
/// `r_coordinate`, the remaining two spatial coordinates are taken in chart
/// order as the polar angle in [0, pi] and the azimuth in [0, 2 pi).
class Region {
 public:
  Region(const SymbolsPtr& symbols, std::string r_coordinate, const std::string& r_min);

  int r_index() const { return r_index_; }
  int theta_index() const { return theta_index_; }
  int phi_index() const { return phi_index_; }
  double lower_bound(std::span<const double> params) const;

 private:
  int r_index_ = 1;
  int theta_index_ = 2;
  int phi_index_ = 3;
  Expr r_min_;
};

struct SpatialIntegrals {
  double energy = 0.0;
  std::array<double, 3> momentum{};
  int panels = 0;
};

/// E = -int t^0 . g^0 dV and P^i = -int g^0 . t^i dV over the region, with dV
/// the proper spatial volume element sqrt|det g_ij| dr dtheta dphi.
/// Throws RegionError when the region reaches a point where the tetrad is not
/// defined (for Schwarzschild, R <= 2M) or when the integrand depends on time
/// or azimuth.
SpatialIntegrals integrate_energy_momentum(const Tetrad& tetrad, const Region& region,
                                           std::span<const double> params,
                                           const QuadratureOptions& options = {});

double integrate_energy(const Tetrad& tetrad, const Region& region, std::span<const double> params,
                        const QuadratureOptions& options = {});
std::array<double, 3> momentum_components(const Tetrad& tetrad, const Region& region,
                                          std::span<const double> params,
                                          const QuadratureOptions& options = {});

}  // namespace stagrav
