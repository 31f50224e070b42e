#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "stagrav/algebra.hpp"
#include "stagrav/expr.hpp"
#include "stagrav/frame.hpp"

namespace stagrav {

// Fields are represented pointwise by their Taylor expansion (a FieldJet)
// around the evaluation point. Every differential operator consumes one jet
// order and raises JetOrderError when none is left.

/// Sixteen tetrad-basis component expressions, indexed by blade mask.
class MultivectorField {
 public:
  MultivectorField() = default;
  MultivectorField(SymbolsPtr symbols, const std::map<unsigned, std::string>& components);
  MultivectorField(SymbolsPtr symbols, std::array<Expr, kBlades> components);

  FieldJet jet(std::span<const double, kDim> point, std::span<const double> params,
               int order) const;

 private:
  std::array<Expr, kBlades> components_;
  std::array<JetEvaluator, kBlades> evaluators_;
  std::array<bool, kBlades> present_{};
};

/// Even-grade spinor representative. Components follow the order
/// [1, g0g1, g0g2, g0g3, g1g2, g1g3, g2g3, tau].
class SpinorField {
 public:
  static constexpr std::array<unsigned, 8> kMasks{0b0000, 0b0011, 0b0101, 0b1001,
                                                  0b0110, 0b1010, 0b1100, 0b1111};

  SpinorField() = default;
  SpinorField(SymbolsPtr symbols, const std::array<std::string, 8>& components);

  FieldJet jet(std::span<const double, kDim> point, std::span<const double> params,
               int order) const;
  const MultivectorField& field() const { return field_; }

 private:
  MultivectorField field_;
};

/// Vector field xi = xi^k e_k given by its frame components.
class VectorField {
 public:
  VectorField() = default;
  VectorField(SymbolsPtr symbols, const std::array<std::string, kDim>& components);

  std::array<Jet, kDim> jet(std::span<const double, kDim> point, std::span<const double> params,
                            int order) const;

 private:
  std::array<JetEvaluator, kDim> evaluators_;
};

/// Coordinate 1-form field dx^mu re-expressed in the tetrad basis.
FieldJet coordinate_coframe(const FrameJet& frame, int mu);

/// Derivative of the tetrad-basis components along e_k, blades held fixed.
FieldJet pfaff_derivative(const FrameJet& frame, const FieldJet& X, int k);
/// D_{e_k} X = pfaff + 1/4 [L(g_k), X].
FieldJet covariant_derivative(const FrameJet& frame, const FieldJet& X, int k);
/// D_{e_k} psi = pfaff + 1/4 L(g_k) psi.
FieldJet spinor_covariant_derivative(const FrameJet& frame, const FieldJet& psi, int k);

FieldJet exterior_d(const FrameJet& frame, const FieldJet& X);
/// delta X = -g^k contracted into D_{e_k} X, so that the Dirac operator is d - delta.
FieldJet codifferential(const FrameJet& frame, const FieldJet& X);
FieldJet dirac_operator(const FrameJet& frame, const FieldJet& X);
/// eta^kl (D_k D_l X - Lambda^m_kl D_m X). Consumes two jet orders.
FieldJet covariant_dalembertian(const FrameJet& frame, const FieldJet& X);

/// S(xi) = xi^k L(g_k) + d(xi lowered).
FieldJet lie_generator(const FrameJet& frame, const std::array<Jet, kDim>& xi);
/// Clifford-field Lie derivative: pfaff along xi + 1/4 [S(xi), X].
FieldJet lie_derivative(const FrameJet& frame, const FieldJet& X, const std::array<Jet, kDim>& xi);
/// Spinor Lie derivative: pfaff along xi + 1/4 S(xi) psi.
FieldJet spinor_lie_derivative(const FrameJet& frame, const FieldJet& psi,
                               const std::array<Jet, kDim>& xi);

}  // namespace stagrav
