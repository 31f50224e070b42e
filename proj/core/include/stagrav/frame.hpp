#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stagrav/algebra.hpp"
#include "stagrav/expr.hpp"
#include "stagrav/jet.hpp"

namespace stagrav {

template <typename T>
using Matrix4 = std::array<std::array<T, kDim>, kDim>;
template <typename T>
using Array3 = std::array<std::array<std::array<T, kDim>, kDim>, kDim>;

using FieldJet = BasicMultivector<Jet>;

/// Gravitational potentials g^a = h^a_mu dx^mu given as expressions.
/// Row a is the tetrad index, column mu the chart coordinate.
class Tetrad {
 public:
  Tetrad() = default;
  Tetrad(SymbolsPtr symbols, const std::array<std::array<std::string, kDim>, kDim>& entries);
  Tetrad(SymbolsPtr symbols, Matrix4<Expr> entries);

  const SymbolsPtr& symbols() const { return symbols_; }
  const Expr& entry(int a, int mu) const { return entries_[a][mu]; }

  /// Jets of every entry at `point`, truncated to `order` (<= 3).
  Matrix4<Jet> jets(std::span<const double, kDim> point, std::span<const double> params,
                    int order) const;

 private:
  SymbolsPtr symbols_;
  Matrix4<Expr> entries_;
  Matrix4<JetEvaluator> evaluators_;
};

/// The Schwarzschild tetrad in (t, r, theta, phi) with mass parameter M.
Tetrad schwarzschild_tetrad();
/// The identity tetrad on a Cartesian chart (t, x, y, z).
Tetrad minkowski_tetrad();

/// Local Taylor expansion of every frame quantity around one chart point.
///
/// `order` is the jet order of h and E. Quantities built from one derivative
/// (c, L, Lambda, Christoffel) have order-1, curvature has order-2.
///
/// Curvature sign: the Ricci 1-forms are R^d = (∂∧∂) g^d. In coordinates this
/// is R_{σν} = -R^ρ_{σρν} with R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} - ∂_ν Γ^ρ_{μσ} + ΓΓ - ΓΓ.
struct FrameJet {
  int order = 0;
  Point point{};
  Matrix4<Jet> h;  // h[a][mu] = h^a_mu
  Matrix4<Jet> E;  // E[a][mu] = h_a^mu, so e_a = E[a][mu] d_mu and dx^mu = E[a][mu] g^a
  // Minors det(h[J][M]) and det(E[J][M]) for equal-grade row/column masks.
  std::array<std::array<Jet, kBlades>, kBlades> h_minor;
  std::array<std::array<Jet, kBlades>, kBlades> E_minor;
  Array3<Jet> c;                   // c[k][a][b] = c^k_ab
  std::array<FieldJet, kDim> L;    // connection bivectors L(g_k)
  Array3<Jet> Lambda;              // Lambda[m][k][l]: nabla_{e_k} e_l = Lambda^m_kl e_m
  Matrix4<Jet> g_dn;
  Matrix4<Jet> g_up;
  Array3<Jet> christoffel;         // christoffel[l][mu][nu] = Gamma^l_{mu nu}
  Matrix4<Jet> ricci;              // frame components R_dk
  Jet ricci_scalar;
  Matrix4<Jet> einstein;           // frame components G_dk
  Jet sqrt_abs_det_g;
};

/// Builds the frame jet at `point`. Throws SingularTetradError when the
/// condition number of h exceeds 1e12.
FrameJet frame_jet(const Tetrad& tetrad, std::span<const double, kDim> point,
                   std::span<const double> params, int order = 2);

/// Plain values of the frame quantities at one chart point.
struct FrameSample {
  Point point{};
  Matrix4<double> h{};
  Matrix4<double> h_inv{};  // h_inv[mu][a], so e_a = h_inv[mu][a] d_mu
  Matrix4<double> g_dn{};
  Matrix4<double> g_up{};
  double sqrt_abs_det_g = 0.0;
  Array3<double> c{};
  std::array<Multivector, kDim> L{};
  Array3<double> Lambda{};
  Array3<double> christoffel{};
  double ricci_scalar = 0.0;
  Matrix4<double> einstein{};
};

FrameSample sample_frame(const Tetrad& tetrad, std::span<const double, kDim> point,
                         std::span<const double> params);
FrameSample sample_frame(const FrameJet& frame);

std::array<Multivector, kDim> connection_bivectors(const FrameSample& sample);
Array3<double> frame_connection_coefficients(const FrameSample& sample);

struct Curvature {
  double R = 0.0;
  Matrix4<double> G{};
};
Curvature curvature(const FrameSample& sample);

/// Volume element tau_g = g^0 g^1 g^2 g^3 in the tetrad basis.
Multivector volume_form(const FrameSample& sample);

/// Jet-matrix inverse by Gauss-Jordan elimination with partial pivoting.
Matrix4<Jet> invert(const Matrix4<Jet>& m);
/// Plain 4x4 inverse; throws SingularTetradError when singular.
Matrix4<double> invert(const Matrix4<double>& m);

}  // namespace stagrav
