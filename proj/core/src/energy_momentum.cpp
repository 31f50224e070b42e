#include "stagrav/energy_momentum.hpp"

#include <algorithm>
#include <cmath>

#include "stagrav/errors.hpp"

namespace stagrav {

namespace {

double eta(int a) { return Signature::eta[static_cast<std::size_t>(a)]; }

FieldJet up(int a) { return FieldJet::basis_vector(a); }
FieldJet down(int a) { return FieldJet::basis_covector(a); }

FieldJet star(const FieldJet& X) { return X.hodge_star(); }
FieldJet unstar(const FieldJet& X) { return X.inverse_hodge_star(); }

FieldJet scaled(FieldJet X, const Jet& s) {
  X.scale(s);
  return X;
}

Jet tau_coefficient(const FieldJet& X) { return X[kPseudoscalarMask]; }

OneForms values_of(const OneFormJets& jets) {
  OneForms out;
  for (int d = 0; d < kDim; ++d) out[d] = values(jets[d]);
  return out;
}

// g2 g1 and friends used by the Dirac sector.
FieldJet g21() { return up(2) * up(1); }
FieldJet g210() { return up(2) * up(1) * up(0); }
FieldJet g021() { return up(0) * up(2) * up(1); }

std::array<FieldJet, kDim> spinor_derivatives(const FrameJet& frame, const FieldJet& psi) {
  std::array<FieldJet, kDim> out;
  for (int k = 0; k < kDim; ++k) out[k] = spinor_covariant_derivative(frame, psi, k);
  return out;
}

}  // namespace

CoordinateOneForm::CoordinateOneForm(SymbolsPtr symbols, const std::array<std::string, kDim>& components) {
  for (int mu = 0; mu < kDim; ++mu)
    evaluators_[mu] = JetEvaluator(Expr::parse(components[mu], symbols), Jet::kMaxOrder);
}

FieldJet CoordinateOneForm::jet(const FrameJet& frame, std::span<const double> params) const {
  FieldJet out;
  std::array<Jet, kDim> A;
  for (int mu = 0; mu < kDim; ++mu) A[mu] = evaluators_[mu].evaluate(frame.point, params, frame.order);
  for (int a = 0; a < kDim; ++a) {
    Jet sum(0.0, frame.order);
    for (int mu = 0; mu < kDim; ++mu)
      if (!A[mu].is_zero() && !frame.E[a][mu].is_zero()) sum += frame.E[a][mu] * A[mu];
    out[blade_mask(a)] = sum;
  }
  return out;
}

double max_abs(const OneForms& forms) {
  double out = 0.0;
  for (const auto& f : forms) out = std::max(out, max_abs(f));
  return out;
}

// ---- gravitational sector ------------------------------------------------

OneFormJets grav_em_nice(const FrameJet& frame) {
  OneFormJets t;
  for (int d = 0; d < kDim; ++d) {
    const FieldJet gd = up(d);
    FieldJet out = covariant_dalembertian(frame, gd);
    out += exterior_d(frame, codifferential(frame, gd));
    out[blade_mask(d)] += 0.5 * frame.ricci_scalar;
    t[d] = out;
  }
  return t;
}

OneForms grav_em_nice(const Tetrad& tetrad, std::span<const double, kDim> point,
                      std::span<const double> params) {
  return values_of(grav_em_nice(frame_jet(tetrad, point, params, 2)));
}

OneForms lower_index(const OneForms& upper) {
  OneForms out;
  for (int d = 0; d < kDim; ++d) out[d] = eta(d) * upper[d];
  return out;
}

LagrangianRouteJets grav_em_lagrangian_forms(const FrameJet& frame) {
  std::array<FieldJet, kDim> dg;        // d g^a
  std::array<FieldJet, kDim> star_dg;   // * d g_a
  std::array<FieldJet, kDim> sds;       // * d * g_a
  std::array<FieldJet, kDim> d_star_up; // d * g^a
  FieldJet W;                           // sum_a d g^a ^ g_a
  for (int a = 0; a < kDim; ++a) {
    dg[a] = exterior_d(frame, up(a));
    d_star_up[a] = exterior_d(frame, star(up(a)));
    star_dg[a] = eta(a) * star(dg[a]);
    sds[a] = star(exterior_d(frame, star(down(a))));
    W += dg[a].wedge(down(a));
  }
  const FieldJet star_W = star(W);

  LagrangianRouteJets out;
  for (int d = 0; d < kDim; ++d) {
    const FieldJet gd = down(d);
    FieldJet P;  // sum_a (g_d _| *g^a) ^ *d*g_a
    FieldJet quadratic;
    FieldJet codiff_terms;
    for (int a = 0; a < kDim; ++a) {
      const FieldJet q = gd.left_contract(star(up(a)));
      P += q.wedge(sds[a]);
      quadratic += gd.left_contract(dg[a]).wedge(star_dg[a]);
      quadratic -= dg[a].wedge(gd.left_contract(star_dg[a]));
      codiff_terms += exterior_d(frame, q).wedge(sds[a]);
      codiff_terms += 0.5 * gd.left_contract(d_star_up[a]).wedge(sds[a]);
    }
    const FieldJet dg_d = eta(d) * dg[d];
    const FieldJet half_gd_W = 0.5 * gd.wedge(star_W);

    FieldJet st = 0.5 * quadratic;
    st += codiff_terms;
    st += 0.5 * dg_d.wedge(star_W);
    st -= 0.25 * W.wedge(gd.left_contract(star_W));
    st -= 0.25 * gd.left_contract(W).wedge(star_W);
    out.star_t[d] = st;

    out.star_S[d] = -star(dg_d) - P + half_gd_W;
    out.star_h[d] = exterior_d(frame, P - half_gd_W);
  }
  return out;
}

LagrangianRoute grav_em_lagrangian(const FrameJet& frame) {
  const LagrangianRouteJets forms = grav_em_lagrangian_forms(frame);
  LagrangianRoute out;
  for (int d = 0; d < kDim; ++d) {
    out.t[d] = values(unstar(forms.star_t[d]));
    out.S[d] = values(unstar(forms.star_S[d]));
    out.h[d] = values(unstar(forms.star_h[d]));
    out.total[d] = out.h[d] - out.t[d];
  }
  return out;
}

LagrangianRoute grav_em_lagrangian(const Tetrad& tetrad, std::span<const double, kDim> point,
                                   std::span<const double> params) {
  return grav_em_lagrangian(frame_jet(tetrad, point, params, 2));
}

Matrix4<double> components(const OneForms& upper) {
  Matrix4<double> out{};
  for (int d = 0; d < kDim; ++d)
    for (int a = 0; a < kDim; ++a) out[d][a] = Multivector::basis_vector(d).scalar_product(upper[a]);
  return out;
}

Matrix4<double> em_asymmetry(const OneForms& upper) {
  const Matrix4<double> t = components(upper);
  Matrix4<double> out{};
  for (int d = 0; d < kDim; ++d)
    for (int a = 0; a < kDim; ++a) out[d][a] = t[d][a] - t[a][d];
  return out;
}

OneFormJets einstein_forms(const FrameJet& frame) {
  OneFormJets out;
  for (int d = 0; d < kDim; ++d)
    for (int k = 0; k < kDim; ++k) out[d][blade_mask(k)] = frame.einstein[d][k];
  return out;
}

OneForms eq211_residual(const FrameJet& frame) {
  const LagrangianRouteJets forms = grav_em_lagrangian_forms(frame);
  const OneFormJets G = einstein_forms(frame);
  OneForms out;
  for (int d = 0; d < kDim; ++d) {
    FieldJet lhs = -exterior_d(frame, forms.star_S[d]) - forms.star_t[d];
    out[d] = values(unstar(lhs) + G[d]);
  }
  return out;
}

// ---- matter sector -------------------------------------------------------

OneFormJets maxwell_forms(const FrameJet& frame, const FieldJet& A) {
  const FieldJet F = exterior_d(frame, A);
  const FieldJet Frev = F.reverse();
  OneFormJets out;
  for (int a = 0; a < kDim; ++a) out[a] = (0.5 * (F * down(a) * Frev)).grade(1);
  return out;
}

MaxwellEM maxwell_em(const FrameJet& frame, const FieldJet& A) {
  const FieldJet Fj = exterior_d(frame, A);
  MaxwellEM out;
  out.F = values(Fj);
  const Multivector Frev = out.F.reverse();
  for (int a = 0; a < kDim; ++a) {
    const Multivector full = 0.5 * (out.F * Multivector::basis_covector(a) * Frev);
    out.grade_leak = std::max(out.grade_leak, max_abs_outside_grade(full, 1));
    out.T[a] = full.grade(1);
  }
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) out.T_ab[a][b] = out.T[a].scalar_product(Multivector::basis_covector(b));

  Matrix4<double> Fl{};  // F = 1/2 F_ab g^a ^ g^b
  for (int a = 0; a < kDim; ++a)
    for (int b = a + 1; b < kDim; ++b) {
      Fl[a][b] = out.F[blade_mask(a, b)];
      Fl[b][a] = -Fl[a][b];
    }
  double FF = 0.0;
  for (int c = 0; c < kDim; ++c)
    for (int d = 0; d < kDim; ++d) FF += Fl[c][d] * Fl[c][d] * eta(c) * eta(d);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      double sum = 0.0;
      for (int c = 0; c < kDim; ++c) sum -= eta(c) * Fl[a][c] * Fl[b][c];
      if (a == b) sum += 0.25 * FF * eta(a);
      out.T_ab_components[a][b] = sum;
    }
  return out;
}

namespace {

// B_mk = <rev(psi) g_m D_k psi g2g1g0 - rev(D_k psi) g_m g2g1g0 psi>_0
Matrix4<Jet> dirac_bilinear(const FieldJet& psi, const std::array<FieldJet, kDim>& Dpsi) {
  const FieldJet psi_rev = psi.reverse();
  const FieldJet tail = g210();
  Matrix4<Jet> B;
  for (int m = 0; m < kDim; ++m)
    for (int k = 0; k < kDim; ++k) {
      const FieldJet first = psi_rev * down(m) * Dpsi[k] * tail;
      const FieldJet second = Dpsi[k].reverse() * down(m) * tail * psi;
      B[m][k] = first[kScalarMask] - second[kScalarMask];
    }
  return B;
}

Matrix4<Jet> dirac_components(const FrameJet& frame, const FieldJet& psi) {
  const auto Dpsi = spinor_derivatives(frame, psi);
  const Matrix4<Jet> B = dirac_bilinear(psi, Dpsi);
  Matrix4<Jet> T;
  for (int m = 0; m < kDim; ++m)
    for (int k = 0; k < kDim; ++k) T[m][k] = 0.25 * (B[m][k] + B[k][m]);
  return T;
}

}  // namespace

OneFormJets dirac_forms(const FrameJet& frame, const FieldJet& psi) {
  const Matrix4<Jet> T = dirac_components(frame, psi);
  OneFormJets out;
  for (int k = 0; k < kDim; ++k)
    for (int m = 0; m < kDim; ++m) out[k][blade_mask(m)] = T[k][m];
  return out;
}

DiracEM dirac_em(const FrameJet& frame, const FieldJet& psi) {
  const auto Dpsi = spinor_derivatives(frame, psi);
  const Matrix4<Jet> B = dirac_bilinear(psi, Dpsi);
  DiracEM out;
  for (int m = 0; m < kDim; ++m)
    for (int k = 0; k < kDim; ++k) out.T_mk[m][k] = 0.25 * (B[m][k].value() + B[k][m].value());
  for (int k = 0; k < kDim; ++k)
    for (int m = 0; m < kDim; ++m) out.T[k][blade_mask(m)] = out.T_mk[k][m];
  const FieldJet psi_rev = psi.reverse();
  for (int k = 0; k < kDim; ++k) {
    const FieldJet lit = Dpsi[k].reverse() * g210() * psi_rev + psi * Dpsi[k] * g021();
    out.literal[k] = values(lit.grade(1));
  }
  return out;
}

OneFormJets interaction_forms(const FieldJet& A, const FieldJet& psi, double charge) {
  const FieldJet J = (psi.reverse() * up(0) * psi).grade(1);
  OneFormJets out;
  for (int a = 0; a < kDim; ++a) out[a] = scaled(charge * J, A[blade_mask(a)]);
  return out;
}

InteractionEM interaction_em(const FieldJet& A, const FieldJet& psi, double charge) {
  const OneForms T = values_of(interaction_forms(A, psi, charge));
  InteractionEM out;
  out.T = T;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      out.T_ab[a][b] = 0.5 * (T[a].scalar_product(Multivector::basis_covector(b)) +
                              T[b].scalar_product(Multivector::basis_covector(a)));
  const Multivector p = values(psi);
  const Multivector lhs = (p.reverse() * Multivector::basis_vector(0) * p).grade(1);
  const Multivector rhs = p * Multivector::basis_vector(0) * p.reverse();
  out.current_mismatch = max_abs(lhs - rhs);
  return out;
}

Multivector dirac_residual(const FrameJet& frame, const FieldJet& psi, const FieldJet* A,
                           double mass, double charge) {
  const auto Dpsi = spinor_derivatives(frame, psi);
  FieldJet out;
  for (int a = 0; a < kDim; ++a) out += up(a) * Dpsi[a] * g21();
  out -= mass * (psi * up(0));
  if (A != nullptr) out += charge * ((*A) * psi);
  return values(out);
}

MaxwellResidual maxwell_residual(const FrameJet& frame, const FieldJet& A, const FieldJet* psi,
                                 double charge) {
  const FieldJet F = exterior_d(frame, A);
  MaxwellResidual out;
  out.dF = values(exterior_d(frame, F));
  FieldJet r = codifferential(frame, F);
  if (psi != nullptr) r += charge * ((*psi) * up(0) * psi->reverse());
  out.deltaF_plus_J = values(r);
  return out;
}

OneFormJets matter_forms(const FrameJet& frame, const Configuration& config) {
  OneFormJets out;
  const auto& m = config.matter;
  std::optional<FieldJet> A;
  std::optional<FieldJet> psi;
  if (m.A) A = m.A->jet(frame, config.params);
  if (m.psi) psi = m.psi->jet(frame.point, config.params, frame.order);
  if (A) {
    const auto T = maxwell_forms(frame, *A);
    for (int d = 0; d < kDim; ++d) out[d] += T[d];
  }
  if (psi) {
    const auto T = dirac_forms(frame, *psi);
    for (int d = 0; d < kDim; ++d) out[d] += T[d];
  }
  if (A && psi) {
    const auto T = interaction_forms(*A, *psi, m.charge);
    for (int d = 0; d < kDim; ++d) out[d] += T[d];
  }
  return out;
}

OneForms conservation_residual(const Configuration& config, std::span<const double, kDim> point) {
  const FrameJet frame = frame_jet(config.tetrad, point, config.params, 3);
  const OneFormJets t = grav_em_nice(frame);
  const OneFormJets T = matter_forms(frame, config);
  OneForms out;
  for (int d = 0; d < kDim; ++d) {
    const FieldJet total = eta(d) * t[d] + T[d];
    out[d] = values(codifferential(frame, total));
  }
  return out;
}

OneForms field_equation_residual(const FrameJet& frame, const Configuration& config) {
  const OneFormJets t = grav_em_nice(frame);
  const OneFormJets T = matter_forms(frame, config);
  OneForms out;
  for (int d = 0; d < kDim; ++d) {
    const FieldJet dgd = exterior_d(frame, down(d));
    out[d] = values(codifferential(frame, dgd) + T[d] + eta(d) * t[d]);
  }
  return out;
}

OneForms field_equation_residual(const Configuration& config, std::span<const double, kDim> point) {
  return field_equation_residual(frame_jet(config.tetrad, point, config.params, 2), config);
}

LagrangianDensities lagrangian_densities(const FrameJet& frame, const Configuration& config) {
  LagrangianDensities out;
  {
    FieldJet Lg;
    FieldJet W;
    for (int a = 0; a < kDim; ++a) {
      const FieldJet dga = exterior_d(frame, up(a));
      const FieldJet dga_low = eta(a) * dga;
      Lg -= 0.5 * dga.wedge(star(dga_low));
      const FieldJet dela = codifferential(frame, up(a));
      Lg += 0.5 * dela.wedge(star(eta(a) * dela));
      W += dga.wedge(down(a));
    }
    Lg += 0.25 * W.wedge(star(W));
    out.L_g = tau_coefficient(Lg).value();
  }
  const auto& m = config.matter;
  std::optional<FieldJet> A;
  std::optional<FieldJet> psi;
  if (m.A) A = m.A->jet(frame, config.params);
  if (m.psi) psi = m.psi->jet(frame.point, config.params, frame.order);
  if (A) {
    const FieldJet F = exterior_d(frame, *A);
    out.L_M = tau_coefficient(-0.5 * F.wedge(star(F))).value();
  }
  if (psi) {
    const FieldJet p = *psi;
    const FieldJet p_rev = p.reverse();
    const FieldJet tail = g021();
    FieldJet a1, a2, a3, a4;
    for (int k = 0; k < kDim; ++k) {
      const FieldJet dp = pfaff_derivative(frame, p, k);
      a1 += up(k) * dp.reverse() * g21() * up(0);
      a2 += up(k) * p_rev * frame.L[k] * tail;
      a3 += up(k) * dp * tail;
      a4 += up(k) * frame.L[k] * p * tail;
    }
    const Jet value = a1.scalar_product(p_rev) - 0.25 * a2.scalar_product(p_rev) +
                      p.scalar_product(a3) + 0.25 * p.scalar_product(a4) +
                      m.mass * p.scalar_product(p_rev);
    out.L_D = value.value();
  }
  if (A && psi) {
    const FieldJet J = (psi->reverse() * up(0) * (*psi)).grade(1);
    out.L_FD = m.charge * tau_coefficient(J.wedge(star(*A))).value();
  }
  return out;
}

EMReport evaluate_report(const Configuration& config, std::span<const double, kDim> point) {
  const FrameJet frame = frame_jet(config.tetrad, point, config.params, 2);
  EMReport r;
  r.point = frame.point;
  r.t_nice = values_of(grav_em_nice(frame));
  const LagrangianRoute route = grav_em_lagrangian(frame);
  r.t_lagrangian = route.total;
  r.t_small = route.t;
  r.S = route.S;
  r.h = route.h;
  r.G = values_of(einstein_forms(frame));
  r.t_components = components(r.t_nice);
  r.asymmetry = em_asymmetry(r.t_nice);
  r.ricci_scalar = frame.ricci_scalar.value();
  r.eq211 = eq211_residual(frame);
  r.field_residual = field_equation_residual(frame, config);
  r.lagrangians = lagrangian_densities(frame, config);

  const auto& m = config.matter;
  std::optional<FieldJet> A;
  std::optional<FieldJet> psi;
  if (m.A) A = m.A->jet(frame, config.params);
  if (m.psi) psi = m.psi->jet(frame.point, config.params, frame.order);
  if (A) {
    r.maxwell = maxwell_em(frame, *A);
    r.maxwell_eq_residual = maxwell_residual(frame, *A, psi ? &*psi : nullptr, m.charge);
  }
  if (psi) {
    r.dirac = dirac_em(frame, *psi);
    r.dirac_eq_residual = dirac_residual(frame, *psi, A ? &*A : nullptr, m.mass, m.charge);
  }
  if (A && psi) r.interaction = interaction_em(*A, *psi, m.charge);

  double scale = std::max(max_abs(r.t_nice), max_abs(r.G));
  for (int d = 0; d < kDim; ++d) {
    const FieldJet dgd = exterior_d(frame, down(d));
    scale = std::max(scale, max_abs(values(codifferential(frame, dgd))));
  }
  r.scale = scale;
  return r;
}

}  // namespace stagrav
