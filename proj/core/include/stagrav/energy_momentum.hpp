#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "stagrav/algebra.hpp"
#include "stagrav/calculus.hpp"
#include "stagrav/frame.hpp"

namespace stagrav {

using OneForms = std::array<Multivector, kDim>;
using OneFormJets = std::array<FieldJet, kDim>;

/// Electromagnetic potential A = A_mu dx^mu given by coordinate components.
class CoordinateOneForm {
 public:
  CoordinateOneForm() = default;
  CoordinateOneForm(SymbolsPtr symbols, const std::array<std::string, kDim>& components);

  /// A expressed in the tetrad basis, A_a = E_a^mu A_mu.
  FieldJet jet(const FrameJet& frame, std::span<const double> params) const;

 private:
  std::array<JetEvaluator, kDim> evaluators_;
};

struct MatterFields {
  std::optional<CoordinateOneForm> A;
  std::optional<SpinorField> psi;
  double mass = 0.0;
  double charge = 0.0;
};

/// Everything needed to evaluate the energy-momentum objects at a point.
struct Configuration {
  Tetrad tetrad;
  MatterFields matter;
  std::vector<double> params;
};

// ---- gravitational sector ------------------------------------------------

/// t^d = 1/2 R g^d + (box g^d) + d delta g^d.
OneFormJets grav_em_nice(const FrameJet& frame);
OneForms grav_em_nice(const Tetrad& tetrad, std::span<const double, kDim> point,
                      std::span<const double> params);

/// Lowered forms t_d = eta_dk t^k.
OneForms lower_index(const OneForms& upper);

struct LagrangianRoute {
  OneForms t;       // t_d, un-starred
  OneForms S;       // S_d, un-starred 2-forms
  OneForms h;       // h_d, un-starred
  OneForms total;   // bold t_d = h_d - t_d
};

struct LagrangianRouteJets {
  OneFormJets star_t;
  OneFormJets star_S;
  OneFormJets star_h;
};

LagrangianRouteJets grav_em_lagrangian_forms(const FrameJet& frame);
LagrangianRoute grav_em_lagrangian(const FrameJet& frame);
LagrangianRoute grav_em_lagrangian(const Tetrad& tetrad, std::span<const double, kDim> point,
                                   std::span<const double> params);

/// Component matrix m[d][a] = g^d . t^a of four upper-index 1-forms.
Matrix4<double> components(const OneForms& upper);
/// tda - tad.
Matrix4<double> em_asymmetry(const OneForms& upper);

/// Einstein 1-forms G_d = G_dk g^k.
OneFormJets einstein_forms(const FrameJet& frame);

/// -d*S_d - *t_d + *G_d, un-starred to 1-forms. Needs frame order >= 2.
/// Vanishes identically with the curvature sign used by FrameJet.
OneForms eq211_residual(const FrameJet& frame);

// ---- matter sector -------------------------------------------------------

struct MaxwellEM {
  OneForms T;             // T_a = <1/2 F g_a rev(F)>_1
  Matrix4<double> T_ab{}; // T_a . g_b
  Matrix4<double> T_ab_components{};  // -eta^cl F_ac F_bl + 1/4 F_cd F^cd eta_ab
  Multivector F;
  double grade_leak = 0.0;  // largest non-vector part of 1/2 F g_a rev(F)
};

OneFormJets maxwell_forms(const FrameJet& frame, const FieldJet& A);
MaxwellEM maxwell_em(const FrameJet& frame, const FieldJet& A);

struct DiracEM {
  OneForms T;                 // T_k = T_km g^m from the symmetrized components
  Matrix4<double> T_mk{};
  OneForms literal;           // diagnostic: the unsymmetrized 1-form as printed
};

OneFormJets dirac_forms(const FrameJet& frame, const FieldJet& psi);
DiracEM dirac_em(const FrameJet& frame, const FieldJet& psi);

struct InteractionEM {
  OneForms T;
  Matrix4<double> T_ab{};
  /// Largest difference between <rev(psi) g0 psi>_1 and psi g0 rev(psi).
  double current_mismatch = 0.0;
};

OneFormJets interaction_forms(const FieldJet& A, const FieldJet& psi, double charge);
InteractionEM interaction_em(const FieldJet& A, const FieldJet& psi, double charge);

/// g^a D_a psi g2 g1 - m psi g0 + e A psi.
Multivector dirac_residual(const FrameJet& frame, const FieldJet& psi, const FieldJet* A,
                           double mass, double charge);

struct MaxwellResidual {
  Multivector dF;
  Multivector deltaF_plus_J;
};
/// Needs A with at least two jet orders.
MaxwellResidual maxwell_residual(const FrameJet& frame, const FieldJet& A, const FieldJet* psi,
                                 double charge);

/// Total matter energy-momentum 1-forms T_d at the frame's point.
OneFormJets matter_forms(const FrameJet& frame, const Configuration& config);

/// delta(T_d + bold t_d). Builds order-3 jets internally.
OneForms conservation_residual(const Configuration& config, std::span<const double, kDim> point);

/// delta(d g_d) + T_d + bold t_d.
OneForms field_equation_residual(const FrameJet& frame, const Configuration& config);
OneForms field_equation_residual(const Configuration& config, std::span<const double, kDim> point);

struct LagrangianDensities {
  double L_g = 0.0;
  std::optional<double> L_M;
  std::optional<double> L_D;
  std::optional<double> L_FD;
};

LagrangianDensities lagrangian_densities(const FrameJet& frame, const Configuration& config);

// ---- full report -----------------------------------------------------------

struct EMReport {
  Point point{};
  OneForms t_nice;        // t^d
  OneForms t_lagrangian;  // bold t_d via the Lagrangian route
  OneForms t_small;       // t_d
  OneForms S;
  OneForms h;
  OneForms G;
  Matrix4<double> t_components{};
  Matrix4<double> asymmetry{};
  double ricci_scalar = 0.0;
  std::optional<MaxwellEM> maxwell;
  std::optional<DiracEM> dirac;
  std::optional<InteractionEM> interaction;
  LagrangianDensities lagrangians;
  OneForms field_residual;
  OneForms eq211;
  std::optional<Multivector> dirac_eq_residual;
  std::optional<MaxwellResidual> maxwell_eq_residual;
  /// Largest coefficient of the gravitational 1-forms; used as a local scale.
  double scale = 0.0;
};

EMReport evaluate_report(const Configuration& config, std::span<const double, kDim> point);

/// Largest absolute coefficient over a set of multivectors.
double max_abs(const OneForms& forms);

}  // namespace stagrav
